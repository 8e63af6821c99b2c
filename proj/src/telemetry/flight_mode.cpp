#include "telemetry/flight_mode.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "mav/messages.hpp"

namespace webgcs::telemetry {
namespace {

constexpr std::array<CopterMode, 26> kCopterModes{{
    {0, "STABILIZE"}, {1, "ACRO"},     {2, "ALT_HOLD"},     {3, "AUTO"},       {4, "GUIDED"},
    {5, "LOITER"},    {6, "RTL"},      {7, "CIRCLE"},       {9, "LAND"},       {11, "DRIFT"},
    {13, "SPORT"},    {14, "FLIP"},    {15, "AUTOTUNE"},    {16, "POSHOLD"},   {17, "BRAKE"},
    {18, "THROW"},    {19, "AVOID_ADSB"}, {20, "GUIDED_NOGPS"}, {21, "SMART_RTL"}, {22, "FLOWHOLD"},
    {23, "FOLLOW"},   {24, "ZIGZAG"},  {25, "SYSTEMID"},    {26, "AUTOROTATE"}, {27, "AUTO_RTL"},
    {28, "TURTLE"},
}};

}  // namespace

std::span<const CopterMode> copter_modes() noexcept { return kCopterModes; }

std::optional<uint32_t> copter_mode_number(std::string_view name) noexcept {
  for (const auto& m : kCopterModes) {
    std::string_view candidate(m.name);
    if (candidate.size() == name.size() &&
        std::equal(candidate.begin(), candidate.end(), name.begin(), [](char a, char b) {
          return a == std::toupper(static_cast<unsigned char>(b));
        })) {
      return m.number;
    }
  }
  return std::nullopt;
}

FlightMode decode_flight_mode(uint32_t custom_mode, uint8_t autopilot) {
  if (autopilot == mav::enums::kAutopilotArdupilotMega) {
    for (const auto& m : kCopterModes) {
      if (m.number == custom_mode) return {custom_mode, m.name};
    }
  }
  return {custom_mode, "UNKNOWN(" + std::to_string(custom_mode) + ")"};
}

}  // namespace webgcs::telemetry
