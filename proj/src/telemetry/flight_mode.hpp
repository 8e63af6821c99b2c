#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace webgcs::telemetry {

struct FlightMode {
  uint32_t custom_mode = 0;
  std::string name = "UNKNOWN(0)";

  bool operator==(const FlightMode&) const = default;
};

struct CopterMode {
  uint32_t number;
  const char* name;
};

// ArduCopter custom_mode numbering.
std::span<const CopterMode> copter_modes() noexcept;

std::optional<uint32_t> copter_mode_number(std::string_view name) noexcept;

// Name from the ArduCopter table when the autopilot is ArduPilot and the
// number is known, otherwise "UNKNOWN(<raw>)".
FlightMode decode_flight_mode(uint32_t custom_mode, uint8_t autopilot);

namespace copter {
inline constexpr uint32_t kStabilize = 0;
inline constexpr uint32_t kAuto = 3;
inline constexpr uint32_t kGuided = 4;
inline constexpr uint32_t kLoiter = 5;
inline constexpr uint32_t kRtl = 6;
inline constexpr uint32_t kLand = 9;
}  // namespace copter

}  // namespace webgcs::telemetry
