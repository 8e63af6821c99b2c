#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace webgcs::link {

inline constexpr int kDefaultBaud = 115200;

struct Endpoint {
  enum class Kind { Tcp, Serial };

  Kind kind = Kind::Tcp;
  std::string host;    // TCP
  uint16_t port = 0;   // TCP, 1..65535
  std::string device;  // serial
  int baud = kDefaultBaud;

  std::string to_string() const;
  bool operator==(const Endpoint&) const = default;
};

// Accepts "tcp://host:port", "host:port" and "serial:/dev/path[@baud]".
// On failure returns nullopt and fills `error`.
std::optional<Endpoint> parse_endpoint(std::string_view text, std::string& error);

}  // namespace webgcs::link
