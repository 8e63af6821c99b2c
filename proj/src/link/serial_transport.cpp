#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "link/transport.hpp"

namespace webgcs::link {
namespace {

speed_t to_speed(int baud) {
  switch (baud) {
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    case 230400: return B230400;
    case 460800: return B460800;
    case 500000: return B500000;
    case 921600: return B921600;
    case 1000000: return B1000000;
    case 1500000: return B1500000;
    case 2000000: return B2000000;
    default: return 0;
  }
}

}  // namespace

SerialTransport::SerialTransport(std::string device, int baud) : device_(std::move(device)), baud_(baud) {}

SerialTransport::~SerialTransport() { close(); }

bool SerialTransport::open(std::string& error) {
  close();
  speed_t speed = to_speed(baud_);
  if (speed == 0) {
    error = "unsupported baud rate " + std::to_string(baud_);
    return false;
  }
  int fd = ::open(device_.c_str(), O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (fd < 0) {
    error = "open " + device_ + ": " + std::strerror(errno);
    return false;
  }
  termios tio{};
  if (::tcgetattr(fd, &tio) == 0) {
    ::cfmakeraw(&tio);
    tio.c_cflag |= CLOCAL | CREAD;
    tio.c_cflag &= ~CRTSCTS;
    tio.c_cc[VMIN] = 0;
    tio.c_cc[VTIME] = 0;
    ::cfsetispeed(&tio, speed);
    ::cfsetospeed(&tio, speed);
    ::tcsetattr(fd, TCSANOW, &tio);
  }
  fd_ = fd;
  return true;
}

void SerialTransport::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

ReadResult SerialTransport::read(std::span<uint8_t> buf, std::chrono::milliseconds timeout) {
  if (fd_ < 0) return {ReadResult::Status::Closed, 0};
  pollfd pfd{fd_, POLLIN, 0};
  int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc == 0) return {ReadResult::Status::Timeout, 0};
  if (rc < 0) return {errno == EINTR ? ReadResult::Status::Timeout : ReadResult::Status::Closed, 0};
  if (pfd.revents & (POLLERR | POLLHUP | POLLNVAL)) return {ReadResult::Status::Closed, 0};
  ssize_t n = ::read(fd_, buf.data(), buf.size());
  if (n > 0) return {ReadResult::Status::Data, static_cast<size_t>(n)};
  if (n < 0 && (errno == EINTR || errno == EAGAIN)) return {ReadResult::Status::Timeout, 0};
  return {ReadResult::Status::Closed, 0};
}

bool SerialTransport::write(std::span<const uint8_t> bytes) {
  size_t sent = 0;
  while (sent < bytes.size()) {
    if (fd_ < 0) return false;
    ssize_t n = ::write(fd_, bytes.data() + sent, bytes.size() - sent);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return false;
    }
    sent += static_cast<size_t>(n);
  }
  return true;
}

}  // namespace webgcs::link
