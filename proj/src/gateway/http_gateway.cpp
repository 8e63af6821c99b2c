#include "gateway/http_gateway.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

namespace webgcs::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

namespace {

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>WebGCS</title></head>
<body>
<h1>WebGCS</h1>
<p>No UI bundle installed (start with --ui-dir). The API is live:</p>
<ul>
<li>GET <a href="/api/state">/api/state</a></li>
<li>GET <a href="/api/fence">/api/fence</a></li>
<li>POST /api/connect, POST /api/command, PUT /api/fence</li>
<li>WebSocket /ws</li>
</ul>
</body></html>
)";

const char* mime_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".woff2") return "font/woff2";
  return "application/octet-stream";
}

Response make_response(const Request& req, http::status status, std::string body, const char* content_type) {
  Response res{status, req.version()};
  res.set(http::field::server, "webgcs");
  res.set(http::field::content_type, content_type);
  res.set(http::field::cache_control, "no-store");
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_response(const Request& req, http::status status, const Json& body) {
  return make_response(req, status, body.dump(), "application/json");
}

Response error_response(const Request& req, http::status status, std::string message) {
  return json_response(req, status, Json{{"error", std::move(message)}});
}

std::string encode_event(const ServiceEvent& ev, uint64_t seq) {
  Json j{{"type", ev.type}, {"payload", ev.payload}, {"seq", seq}, {"ts", ev.ts}};
  return j.dump();
}

}  // namespace

class WsSession;

struct HttpGateway::Impl {
  Impl(GcsService& s, GatewayConfig c) : service(s), config(std::move(c)), acceptor(ioc) {}

  void do_accept();
  void fan_out(const ServiceEvent& ev);
  void attach(uint64_t id, std::weak_ptr<WsSession> session);
  void detach(uint64_t id);
  Response route(const Request& req);
  Response serve_static(const Request& req, std::string_view target);
  Response handle_connect(const Request& req);
  Response handle_command(const Request& req);
  Response handle_fence(const Request& req);

  GcsService& service;
  GatewayConfig config;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  uint16_t port = 0;
  uint64_t sink_id = 0;

  mutable std::mutex sessions_mutex;
  std::map<uint64_t, std::weak_ptr<WsSession>> sessions;
  std::atomic<uint64_t> next_session{1};
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, HttpGateway::Impl& gw) : ws_(std::move(socket)), gw_(gw), id_(gw.next_session++) {}

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  // Any thread.
  void deliver(std::shared_ptr<const ServiceEvent> ev) {
    net::post(ws_.get_executor(), [self = shared_from_this(), ev = std::move(ev)] { self->enqueue(ev); });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    // A fresh client sees the whole state before anything else.
    enqueue(std::make_shared<const ServiceEvent>(ServiceEvent{"telemetry", gw_.service.telemetry_json(), unix_millis()}));
    gw_.attach(id_, weak_from_this());
    do_read();
  }

  void enqueue(std::shared_ptr<const ServiceEvent> ev) {
    if (closed_) return;
    if (ev->type == "telemetry") {
      std::erase_if(queue_, [](const auto& e) { return e->type == "telemetry"; });
    } else if (queue_.size() >= gw_.config.client_buffer) {
      // Cannot drop command or link events; give up on this client instead.
      shutdown();
      return;
    }
    queue_.push_back(std::move(ev));
    maybe_write();
  }

  void maybe_write() {
    if (writing_ || closed_ || queue_.empty()) return;
    auto ev = std::move(queue_.front());
    queue_.pop_front();
    out_ = encode_event(*ev, ++seq_);
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(out_), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, size_t) {
    writing_ = false;
    if (ec) {
      shutdown();
      return;
    }
    maybe_write();
  }

  void do_read() {
    ws_.async_read(rbuf_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, size_t) {
    if (ec) {
      shutdown();
      return;
    }
    // Client messages carry nothing the server acts on.
    rbuf_.consume(rbuf_.size());
    do_read();
  }

  void shutdown() {
    if (closed_) return;
    closed_ = true;
    queue_.clear();
    gw_.detach(id_);
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
  }

  websocket::stream<beast::tcp_stream> ws_;
  HttpGateway::Impl& gw_;
  uint64_t id_;
  beast::flat_buffer rbuf_;
  std::deque<std::shared_ptr<const ServiceEvent>> queue_;
  std::string out_;
  uint64_t seq_ = 0;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, HttpGateway::Impl& gw) : stream_(std::move(socket)), gw_(gw) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buf_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, size_t) {
    if (ec == http::error::end_of_stream) {
      close();
      return;
    }
    if (ec) return;

    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), gw_)->run(std::move(req_));
        return;
      }
      res_ = std::make_shared<Response>(error_response(req_, http::status::not_found, "no websocket here"));
    } else {
      Response res;
      try {
        res = gw_.route(req_);
      } catch (const std::exception& e) {
        res = error_response(req_, http::status::internal_server_error, e.what());
      }
      res_ = std::make_shared<Response>(std::move(res));
    }
    http::async_write(stream_, *res_, beast::bind_front_handler(&HttpSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, size_t) {
    if (ec) return;
    if (!res_->keep_alive()) {
      close();
      return;
    }
    res_.reset();
    do_read();
  }

  void close() {
    beast::error_code ignored;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
  }

  beast::tcp_stream stream_;
  HttpGateway::Impl& gw_;
  beast::flat_buffer buf_;
  Request req_;
  std::shared_ptr<Response> res_;
};

void HttpGateway::Impl::do_accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (!acceptor.is_open()) return;
    if (!ec) {
      beast::error_code ignored;
      socket.set_option(tcp::no_delay(true), ignored);
      std::make_shared<HttpSession>(std::move(socket), *this)->run();
    }
    do_accept();
  });
}

void HttpGateway::Impl::fan_out(const ServiceEvent& ev) {
  auto shared = std::make_shared<const ServiceEvent>(ev);
  std::lock_guard lock(sessions_mutex);
  for (auto& [id, weak] : sessions) {
    if (auto s = weak.lock()) s->deliver(shared);
  }
}

void HttpGateway::Impl::attach(uint64_t id, std::weak_ptr<WsSession> session) {
  std::lock_guard lock(sessions_mutex);
  sessions.emplace(id, std::move(session));
}

void HttpGateway::Impl::detach(uint64_t id) {
  std::lock_guard lock(sessions_mutex);
  sessions.erase(id);
}

Response HttpGateway::Impl::route(const Request& req) {
  std::string_view target(req.target().data(), req.target().size());
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);

  if (target == "/api/state") {
    if (req.method() != http::verb::get) return error_response(req, http::status::method_not_allowed, "use GET");
    return json_response(req, http::status::ok, service.state_json());
  }
  if (target == "/api/connect") {
    if (req.method() != http::verb::post) return error_response(req, http::status::method_not_allowed, "use POST");
    return handle_connect(req);
  }
  if (target == "/api/command") {
    if (req.method() != http::verb::post) return error_response(req, http::status::method_not_allowed, "use POST");
    return handle_command(req);
  }
  if (target == "/api/fence") return handle_fence(req);
  if (target.starts_with("/api/")) return error_response(req, http::status::not_found, "unknown endpoint");
  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    return error_response(req, http::status::method_not_allowed, "use GET");
  }
  return serve_static(req, target);
}

Response HttpGateway::Impl::serve_static(const Request& req, std::string_view target) {
  namespace fs = std::filesystem;
  if (config.ui_dir.empty()) {
    if (target == "/" || target == "/index.html") {
      return make_response(req, http::status::ok, kPlaceholderPage, "text/html; charset=utf-8");
    }
    return error_response(req, http::status::not_found, "not found");
  }
  std::error_code ec;
  const fs::path root = fs::weakly_canonical(config.ui_dir, ec);
  std::string rel(target.substr(1));
  if (rel.empty()) rel = "index.html";
  fs::path path = fs::weakly_canonical(root / rel, ec);
  const auto [mismatch, _] = std::mismatch(root.begin(), root.end(), path.begin(), path.end());
  if (ec || mismatch != root.end()) return error_response(req, http::status::not_found, "not found");
  if (fs::is_directory(path, ec)) path /= "index.html";
  std::ifstream in(path, std::ios::binary);
  if (!in) return error_response(req, http::status::not_found, "not found");
  std::ostringstream body;
  body << in.rdbuf();
  return make_response(req, http::status::ok, body.str(), mime_type(path));
}

Response HttpGateway::Impl::handle_connect(const Request& req) {
  const Json body = Json::parse(req.body(), nullptr, false);
  if (body.is_discarded() || !body.is_object()) return error_response(req, http::status::bad_request, "invalid JSON body");
  auto it = body.find("address");
  if (it == body.end() || !it->is_string()) return error_response(req, http::status::bad_request, "address is required");
  bool force = false;
  if (auto f = body.find("force"); f != body.end()) {
    if (!f->is_boolean()) return error_response(req, http::status::bad_request, "force must be a boolean");
    force = f->get<bool>();
  }
  auto result = service.connect(it->get<std::string>(), force);
  switch (result.status) {
    case ConnectStatus::Accepted:
      return json_response(req, http::status::ok,
                           Json{{"accepted", true},
                                {"endpoint", result.message},
                                {"link", link_json(service.link_state(), std::nullopt)["phase"]}});
    case ConnectStatus::BadAddress:
      return json_response(req, http::status::bad_request, Json{{"accepted", false}, {"error", result.message}});
    case ConnectStatus::ArmedNeedsForce:
      return json_response(req, http::status::conflict, Json{{"accepted", false}, {"error", result.message}});
    case ConnectStatus::Failed:
      break;
  }
  return json_response(req, http::status::internal_server_error, Json{{"accepted", false}, {"error", result.message}});
}

Response HttpGateway::Impl::handle_command(const Request& req) {
  const Json body = Json::parse(req.body(), nullptr, false);
  if (body.is_discarded()) {
    return json_response(req, http::status::bad_request, Json{{"errors", {{"body", "invalid JSON"}}}});
  }
  const auto snap = service.snapshot();
  auto parsed = parse_command(body, service.takeoff_default_m(), snap.rel_alt.value);
  if (!parsed.command) return json_response(req, http::status::bad_request, Json{{"errors", parsed.errors}});

  auto submission = service.submit(std::move(*parsed.command));
  if (submission.status == SubmitStatus::LinkDown) {
    return error_response(req, http::status::conflict, "link down");
  }
  Json immediate = Json::array();
  for (const auto& o : submission.immediate) immediate.push_back(to_json(o));
  return json_response(req, http::status::accepted, Json{{"token", submission.token}, {"immediate", immediate}});
}

Response HttpGateway::Impl::handle_fence(const Request& req) {
  if (req.method() == http::verb::get) return json_response(req, http::status::ok, to_json(service.effective_fence()));
  if (req.method() != http::verb::put) return error_response(req, http::status::method_not_allowed, "use GET or PUT");
  const Json body = Json::parse(req.body(), nullptr, false);
  if (body.is_discarded()) {
    return json_response(req, http::status::bad_request, Json{{"errors", {{"body", "invalid JSON"}}}});
  }
  Json errors = service.update_fence(body);
  if (!errors.empty()) return json_response(req, http::status::bad_request, Json{{"errors", errors}});
  return json_response(req, http::status::ok, to_json(service.effective_fence()));
}

HttpGateway::HttpGateway(GcsService& service, GatewayConfig config)
    : impl_(std::make_unique<Impl>(service, std::move(config))) {}

HttpGateway::~HttpGateway() { stop(); }

bool HttpGateway::start(std::string& error) {
  auto& gw = *impl_;
  if (!gw.threads.empty()) {
    error = "already running";
    return false;
  }
  beast::error_code ec;
  const auto address = net::ip::make_address(gw.config.bind_address, ec);
  if (ec) {
    error = "bad bind address " + gw.config.bind_address;
    return false;
  }
  const tcp::endpoint endpoint{address, gw.config.port};
  gw.acceptor.open(endpoint.protocol(), ec);
  if (!ec) gw.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) gw.acceptor.bind(endpoint, ec);
  if (!ec) gw.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    error = "listen " + gw.config.bind_address + ":" + std::to_string(gw.config.port) + ": " + ec.message();
    beast::error_code ignored;
    gw.acceptor.close(ignored);
    return false;
  }
  gw.port = gw.acceptor.local_endpoint().port();
  gw.sink_id = gw.service.subscribe([&gw](const ServiceEvent& ev) { gw.fan_out(ev); });
  gw.do_accept();
  const int n = std::max(1, gw.config.threads);
  for (int i = 0; i < n; ++i) gw.threads.emplace_back([&gw] { gw.ioc.run(); });
  return true;
}

void HttpGateway::stop() {
  auto& gw = *impl_;
  if (gw.threads.empty()) return;
  gw.service.unsubscribe(gw.sink_id);
  net::post(gw.ioc, [&gw] {
    beast::error_code ignored;
    gw.acceptor.close(ignored);
  });
  gw.ioc.stop();
  for (auto& t : gw.threads) t.join();
  gw.threads.clear();
  std::lock_guard lock(gw.sessions_mutex);
  gw.sessions.clear();
}

uint16_t HttpGateway::port() const noexcept { return impl_->port; }

size_t HttpGateway::client_count() const {
  std::lock_guard lock(impl_->sessions_mutex);
  return impl_->sessions.size();
}

}  // namespace webgcs::gateway
