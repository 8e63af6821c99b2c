#include "ws_client.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace testsupport {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct WsClient::Impl {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  std::thread reader;
  mutable std::mutex mutex;
  std::condition_variable cv;
  std::vector<WsMessage> messages;
  size_t cursor = 0;
  bool open = false;

  void read_loop() {
    beast::flat_buffer buf;
    while (true) {
      beast::error_code ec;
      ws.read(buf, ec);
      if (ec) break;
      auto text = beast::buffers_to_string(buf.data());
      buf.consume(buf.size());
      WsMessage m{nlohmann::json::parse(text, nullptr, false), std::chrono::steady_clock::now()};
      std::lock_guard lock(mutex);
      messages.push_back(std::move(m));
      cv.notify_all();
    }
    std::lock_guard lock(mutex);
    open = false;
    cv.notify_all();
  }
};

WsClient::WsClient() : impl_(std::make_unique<Impl>()) {}

WsClient::~WsClient() { close(); }

bool WsClient::connect(const std::string& host, uint16_t port, std::string& error, const std::string& path) {
  try {
    tcp::resolver resolver(impl_->ioc);
    auto results = resolver.resolve(host, std::to_string(port));
    net::connect(impl_->ws.next_layer(), results.begin(), results.end());
    impl_->ws.handshake(host + ":" + std::to_string(port), path);
  } catch (const std::exception& e) {
    error = e.what();
    return false;
  }
  impl_->open = true;
  impl_->reader = std::thread([this] { impl_->read_loop(); });
  return true;
}

void WsClient::close() {
  if (!impl_->reader.joinable()) return;
  beast::error_code ec;
  impl_->ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
  impl_->reader.join();
  impl_->ws.next_layer().close(ec);
}

bool WsClient::is_open() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->open;
}

std::optional<WsMessage> WsClient::wait_for(const std::function<bool(const nlohmann::json&)>& pred,
                                            std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(impl_->mutex);
  while (true) {
    for (; impl_->cursor < impl_->messages.size(); ++impl_->cursor) {
      if (pred(impl_->messages[impl_->cursor].json)) return impl_->messages[impl_->cursor++];
    }
    if (!impl_->open) return std::nullopt;
    if (impl_->cv.wait_until(lock, deadline) == std::cv_status::timeout) {
      for (; impl_->cursor < impl_->messages.size(); ++impl_->cursor) {
        if (pred(impl_->messages[impl_->cursor].json)) return impl_->messages[impl_->cursor++];
      }
      return std::nullopt;
    }
  }
}

std::vector<WsMessage> WsClient::log() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->messages;
}

}  // namespace testsupport
