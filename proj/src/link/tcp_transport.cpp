#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "link/transport.hpp"

namespace webgcs::link {

TcpTransport::TcpTransport(std::string host, uint16_t port, std::chrono::milliseconds connect_timeout)
    : host_(std::move(host)), port_(port), connect_timeout_(connect_timeout) {}

TcpTransport::~TcpTransport() { close(); }

bool TcpTransport::open(std::string& error) {
  close();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(port_);
  if (int rc = ::getaddrinfo(host_.c_str(), port.c_str(), &hints, &res); rc != 0) {
    error = "resolve " + host_ + ": " + ::gai_strerror(rc);
    return false;
  }

  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(connect_timeout_.count()));
      if (rc == 1) {
        int so_error = 0;
        socklen_t len = sizeof(so_error);
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &so_error, &len);
        rc = so_error == 0 ? 0 : -1;
        errno = so_error;
      } else {
        if (rc == 0) errno = ETIMEDOUT;
        rc = -1;
      }
    }
    if (rc == 0) {
      ::fcntl(fd, F_SETFL, flags);
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      fd_ = fd;
      break;
    }
    error = "connect " + host_ + ":" + port + ": " + std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(res);
  return fd_ >= 0;
}

void TcpTransport::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

ReadResult TcpTransport::read(std::span<uint8_t> buf, std::chrono::milliseconds timeout) {
  if (fd_ < 0) return {ReadResult::Status::Closed, 0};
  pollfd pfd{fd_, POLLIN, 0};
  int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc == 0) return {ReadResult::Status::Timeout, 0};
  if (rc < 0) return {errno == EINTR ? ReadResult::Status::Timeout : ReadResult::Status::Closed, 0};
  ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
  if (n > 0) return {ReadResult::Status::Data, static_cast<size_t>(n)};
  if (n < 0 && (errno == EINTR || errno == EAGAIN)) return {ReadResult::Status::Timeout, 0};
  return {ReadResult::Status::Closed, 0};
}

bool TcpTransport::write(std::span<const uint8_t> bytes) {
  size_t sent = 0;
  while (sent < bytes.size()) {
    if (fd_ < 0) return false;
    ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<size_t>(n);
  }
  return true;
}

std::unique_ptr<Transport> make_transport(const Endpoint& endpoint) {
  if (endpoint.kind == Endpoint::Kind::Serial) return std::make_unique<SerialTransport>(endpoint.device, endpoint.baud);
  return std::make_unique<TcpTransport>(endpoint.host, endpoint.port);
}

}  // namespace webgcs::link
