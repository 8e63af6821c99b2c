#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "link/endpoint.hpp"

namespace webgcs::link {

struct ReadResult {
  enum class Status { Data, Timeout, Closed };
  Status status = Status::Timeout;
  size_t bytes = 0;
};

// Byte stream to a vehicle. read() is only called from the link's reader
// thread; write() may run concurrently with it but is serialized by the link.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual bool open(std::string& error) = 0;
  virtual void close() = 0;
  virtual bool is_open() const = 0;
  virtual ReadResult read(std::span<uint8_t> buf, std::chrono::milliseconds timeout) = 0;
  virtual bool write(std::span<const uint8_t> bytes) = 0;
};

class TcpTransport final : public Transport {
 public:
  TcpTransport(std::string host, uint16_t port, std::chrono::milliseconds connect_timeout = std::chrono::seconds(2));
  ~TcpTransport() override;

  bool open(std::string& error) override;
  void close() override;
  bool is_open() const override { return fd_ >= 0; }
  ReadResult read(std::span<uint8_t> buf, std::chrono::milliseconds timeout) override;
  bool write(std::span<const uint8_t> bytes) override;

 private:
  std::string host_;
  uint16_t port_;
  std::chrono::milliseconds connect_timeout_;
  int fd_ = -1;
};

class SerialTransport final : public Transport {
 public:
  SerialTransport(std::string device, int baud);
  ~SerialTransport() override;

  bool open(std::string& error) override;
  void close() override;
  bool is_open() const override { return fd_ >= 0; }
  ReadResult read(std::span<uint8_t> buf, std::chrono::milliseconds timeout) override;
  bool write(std::span<const uint8_t> bytes) override;

 private:
  std::string device_;
  int baud_;
  int fd_ = -1;
};

using TransportFactory = std::function<std::unique_ptr<Transport>(const Endpoint&)>;

std::unique_ptr<Transport> make_transport(const Endpoint& endpoint);

}  // namespace webgcs::link
