#include "link/endpoint.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace webgcs::link {
namespace {

bool parse_uint(std::string_view s, long max, long& out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out <= max;
}

}  // namespace

std::string Endpoint::to_string() const {
  if (kind == Kind::Serial) return "serial:" + device + "@" + std::to_string(baud);
  return "tcp://" + host + ":" + std::to_string(port);
}

std::optional<Endpoint> parse_endpoint(std::string_view text, std::string& error) {
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
  if (trimmed.empty()) {
    error = "empty address";
    return std::nullopt;
  }

  Endpoint ep;
  if (trimmed.starts_with("serial:")) {
    auto rest = trimmed.substr(7);
    ep.kind = Endpoint::Kind::Serial;
    auto at = rest.rfind('@');
    if (at != std::string_view::npos) {
      long baud = 0;
      if (!parse_uint(rest.substr(at + 1), 4000000, baud) || baud <= 0) {
        error = "invalid baud rate in '" + std::string(trimmed) + "'";
        return std::nullopt;
      }
      ep.baud = static_cast<int>(baud);
      rest = rest.substr(0, at);
    }
    if (rest.empty() || rest.front() != '/') {
      error = "serial device must be an absolute path";
      return std::nullopt;
    }
    ep.device = std::string(rest);
    return ep;
  }

  auto rest = trimmed;
  if (rest.starts_with("tcp://")) rest.remove_prefix(6);
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    error = "expected host:port, got '" + std::string(trimmed) + "'";
    return std::nullopt;
  }
  auto host = rest.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  if (host.empty() || std::any_of(host.begin(), host.end(), [](unsigned char c) { return std::isspace(c) || c == '/'; })) {
    error = "invalid host in '" + std::string(trimmed) + "'";
    return std::nullopt;
  }
  long port = 0;
  if (!parse_uint(rest.substr(colon + 1), 65535, port) || port < 1) {
    error = "port must be 1-65535 in '" + std::string(trimmed) + "'";
    return std::nullopt;
  }
  ep.host = std::string(host);
  ep.port = static_cast<uint16_t>(port);
  return ep;
}

}  // namespace webgcs::link
