#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "safety/geo.hpp"
#include "telemetry/telemetry_store.hpp"
#include "util/clock.hpp"

namespace webgcs::commands {
struct FlightCommand;
}

namespace webgcs::safety {

enum class BreachAction { Warn, DenyOnly, AutoRtl };

const char* to_string(BreachAction action) noexcept;
std::optional<BreachAction> parse_breach_action(std::string_view text) noexcept;

// Cylinder centered on home: horizontal radius plus an altitude ceiling
// relative to home.
struct FenceConfig {
  std::optional<LatLon> home;
  double radius_m = 100.0;
  double max_alt_m = 50.0;
  BreachAction breach_action = BreachAction::AutoRtl;

  bool valid() const noexcept { return radius_m > 0.0 && max_alt_m > 0.0; }
  bool operator==(const FenceConfig&) const = default;
};

struct FenceVerdict {
  bool allowed = false;
  std::string reason;
  double distance_m = 0.0;  // from home
  double margin_m = 0.0;    // smallest of horizontal and vertical margin; negative outside
};

// Boundaries are inclusive.
FenceVerdict evaluate_point(const FenceConfig& fence, const LatLon& point, double rel_alt_m);

// Altitude ceiling only; used where the horizontal position is not changing.
FenceVerdict evaluate_altitude(const FenceConfig& fence, double rel_alt_m);

FenceVerdict vet(const FenceConfig& fence, const commands::FlightCommand& cmd);

struct BreachEvent {
  TimePoint at{};
  double distance_m = 0.0;
  double rel_alt_m = 0.0;
  double margin_m = 0.0;
  std::string reason;
  BreachAction action = BreachAction::Warn;
  bool request_rtl = false;
};

// Edge-triggered in-flight check: one event per excursion while armed.
class FenceMonitor {
 public:
  std::optional<BreachEvent> update(const FenceConfig& fence, const telemetry::TelemetrySnapshot& snapshot, TimePoint now);
  bool in_breach() const noexcept { return latched_; }
  void reset() noexcept { latched_ = false; }

 private:
  bool latched_ = false;
};

}  // namespace webgcs::safety
