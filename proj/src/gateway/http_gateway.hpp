#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "gateway/gcs_service.hpp"

namespace webgcs::gateway {

struct GatewayConfig {
  std::string bind_address = "0.0.0.0";
  uint16_t port = 5000;  // 0 picks an ephemeral port
  std::string ui_dir;    // static bundle; empty serves a placeholder page
  int threads = 2;
  // Per-client cap on undelivered non-telemetry events before the client is
  // dropped. Telemetry never queues (latest wins).
  size_t client_buffer = 4096;
};

// HTTP/1.1 API and WebSocket event stream in front of a GcsService.
class HttpGateway {
 public:
  HttpGateway(GcsService& service, GatewayConfig config = {});
  ~HttpGateway();

  HttpGateway(const HttpGateway&) = delete;
  HttpGateway& operator=(const HttpGateway&) = delete;

  bool start(std::string& error);
  void stop();
  uint16_t port() const noexcept;
  size_t client_count() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace webgcs::gateway
