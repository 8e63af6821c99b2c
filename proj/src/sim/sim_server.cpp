#include "sim/sim_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>

namespace webgcs::sim {
namespace {

constexpr size_t kMaxLog = 100000;

}  // namespace

SimServer::SimServer(SimParams params, SimServerConfig config) : config_(std::move(config)), vehicle_(params) {}

SimServer::~SimServer() { stop(); }

bool SimServer::start(std::string& error) {
  if (running_) {
    error = "already running";
    return false;
  }
  int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) {
    error = std::string("socket: ") + std::strerror(errno);
    return false;
  }
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    error = "bad bind address " + config_.bind_address;
    return false;
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd, 8) != 0) {
    error = "bind " + config_.bind_address + ":" + std::to_string(config_.port) + ": " + std::strerror(errno);
    ::close(fd);
    return false;
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  bound_port_ = ntohs(addr.sin_port);
  // Keep the same port across a restart.
  config_.port = bound_port_;
  listen_fd_ = fd;

  last_wall_ = SteadyClock::now();
  stop_ = false;
  running_ = true;
  thread_ = std::thread([this] { run(); });
  return true;
}

void SimServer::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
  close_all();
  running_ = false;
}

void SimServer::close_all() {
  std::lock_guard lock(mutex_);
  for (auto& c : clients_) ::close(c.fd);
  clients_.clear();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

SimState SimServer::state() const {
  std::lock_guard lock(mutex_);
  return vehicle_.state();
}

double SimServer::sim_time() const {
  std::lock_guard lock(mutex_);
  return vehicle_.sim_time();
}

size_t SimServer::client_count() const {
  std::lock_guard lock(mutex_);
  return clients_.size();
}

std::vector<PositionEmission> SimServer::position_log() const {
  std::lock_guard lock(mutex_);
  return position_log_;
}

std::vector<ReceivedCommand> SimServer::received_commands() const {
  std::lock_guard lock(mutex_);
  return received_;
}

void SimServer::with_vehicle(const std::function<void(SimVehicle&)>& fn) {
  std::lock_guard lock(mutex_);
  fn(vehicle_);
}

void SimServer::run() {
  while (!stop_) {
    std::vector<pollfd> fds;
    {
      std::lock_guard lock(mutex_);
      fds.push_back({listen_fd_, POLLIN, 0});
      for (const auto& c : clients_) fds.push_back({c.fd, POLLIN, 0});
    }
    ::poll(fds.data(), fds.size(), 5);

    if (fds[0].revents & POLLIN) accept_clients();
    {
      std::lock_guard lock(mutex_);
      for (size_t i = 1; i < fds.size(); ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        auto it = std::find_if(clients_.begin(), clients_.end(), [&](const Client& c) { return c.fd == fds[i].fd; });
        if (it != clients_.end()) read_client(*it);
      }
      std::erase_if(clients_, [](const Client& c) { return c.fd < 0; });
      advance(SteadyClock::now());
    }
  }
}

void SimServer::accept_clients() {
  int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
  if (fd < 0) return;
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  std::lock_guard lock(mutex_);
  clients_.push_back(Client{fd, {}});
}

// Caller holds mutex_.
void SimServer::read_client(Client& c) {
  std::array<uint8_t, 2048> buf{};
  ssize_t n = ::recv(c.fd, buf.data(), buf.size(), MSG_DONTWAIT);
  if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
    ::close(c.fd);
    c.fd = -1;
    return;
  }
  if (n < 0) return;
  const TimePoint now = SteadyClock::now();
  auto result = c.parser.feed(std::span(buf.data(), static_cast<size_t>(n)));
  for (const auto& frame : result.frames) {
    mav::Message msg;
    try {
      msg = mav::decode_message(frame);
    } catch (const mav::CodecError&) {
      continue;
    }
    if (!std::holds_alternative<mav::CommandLong>(msg) && !std::holds_alternative<mav::SetPositionTargetGlobalInt>(msg)) {
      continue;
    }
    if (received_.size() < kMaxLog) received_.push_back({msg, now});
    if (auto ack = vehicle_.handle_command(msg)) broadcast(*ack, now);
  }
}

// Caller holds mutex_.
void SimServer::advance(TimePoint now) {
  double wall_dt = Seconds(now - last_wall_).count();
  last_wall_ = now;
  double sim_dt = wall_dt * vehicle_.params().time_scale;
  const double step = config_.max_step_s > 0.0 ? config_.max_step_s : 0.05;
  do {
    const double dt = std::min(step, sim_dt);
    vehicle_.step(dt);
    sim_dt -= dt;
    for (const auto& msg : vehicle_.emit_due_messages(vehicle_.sim_time())) broadcast(msg, now);
  } while (sim_dt > 0.0);
}

// Caller holds mutex_.
void SimServer::broadcast(const mav::Message& msg, TimePoint now) {
  auto bytes = mav::encode_frame(msg, {seq_++, config_.sys_id, config_.comp_id}, mav::Version::V2);
  for (auto& c : clients_) {
    if (c.fd < 0) continue;
    ssize_t n = ::send(c.fd, bytes.data(), bytes.size(), MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n < 0 && errno != EAGAIN) {
      ::close(c.fd);
      c.fd = -1;
    }
  }
  if (const auto* p = std::get_if<mav::GlobalPositionInt>(&msg); p && position_log_.size() < kMaxLog) {
    position_log_.push_back({p->time_boot_ms, now});
  }
}

}  // namespace webgcs::sim
