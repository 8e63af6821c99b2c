#include "safety/geofence.hpp"

#include <algorithm>
#include <cctype>

#include "commands/flight_command.hpp"

namespace webgcs::safety {

const char* to_string(BreachAction action) noexcept {
  switch (action) {
    case BreachAction::Warn: return "warn";
    case BreachAction::DenyOnly: return "deny_only";
    case BreachAction::AutoRtl: return "auto_rtl";
  }
  return "unknown";
}

std::optional<BreachAction> parse_breach_action(std::string_view text) noexcept {
  std::string lower;
  for (char c : text) lower.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "warn") return BreachAction::Warn;
  if (lower == "deny_only" || lower == "deny") return BreachAction::DenyOnly;
  if (lower == "auto_rtl" || lower == "rtl") return BreachAction::AutoRtl;
  return std::nullopt;
}

FenceVerdict evaluate_altitude(const FenceConfig& fence, double rel_alt_m) {
  FenceVerdict v;
  v.margin_m = fence.max_alt_m - rel_alt_m;
  v.allowed = v.margin_m >= 0.0;
  if (!v.allowed) v.reason = "altitude " + std::to_string(rel_alt_m) + " m above ceiling " + std::to_string(fence.max_alt_m) + " m";
  return v;
}

FenceVerdict evaluate_point(const FenceConfig& fence, const LatLon& point, double rel_alt_m) {
  if (!fence.home) return FenceVerdict{false, "no home", 0.0, 0.0};
  FenceVerdict v;
  v.distance_m = geo::distance_m(*fence.home, point);
  const double horizontal = fence.radius_m - v.distance_m;
  const double vertical = fence.max_alt_m - rel_alt_m;
  v.margin_m = std::min(horizontal, vertical);
  v.allowed = horizontal >= 0.0 && vertical >= 0.0;
  if (horizontal < 0.0) {
    v.reason = "target " + std::to_string(v.distance_m) + " m from home exceeds fence radius " +
               std::to_string(fence.radius_m) + " m";
  } else if (vertical < 0.0) {
    v.reason = "altitude " + std::to_string(rel_alt_m) + " m above ceiling " + std::to_string(fence.max_alt_m) + " m";
  }
  return v;
}

FenceVerdict vet(const FenceConfig& fence, const commands::FlightCommand& cmd) {
  using commands::CommandKind;
  switch (cmd.kind) {
    case CommandKind::Goto:
      return evaluate_point(fence, {cmd.lat, cmd.lon}, cmd.alt_m);
    case CommandKind::Takeoff:
      return evaluate_altitude(fence, cmd.alt_m);
    default:
      return FenceVerdict{true, "", 0.0, 0.0};
  }
}

std::optional<BreachEvent> FenceMonitor::update(const FenceConfig& fence, const telemetry::TelemetrySnapshot& snapshot,
                                                TimePoint now) {
  auto pos = snapshot.position();
  if (!snapshot.is_armed() || !pos || !fence.home) {
    latched_ = false;
    return std::nullopt;
  }
  const double alt = snapshot.rel_alt.value.value_or(0.0);
  FenceVerdict v = evaluate_point(fence, *pos, alt);
  if (v.allowed) {
    latched_ = false;
    return std::nullopt;
  }
  if (latched_) return std::nullopt;
  latched_ = true;
  BreachEvent e;
  e.at = now;
  e.distance_m = v.distance_m;
  e.rel_alt_m = alt;
  e.margin_m = v.margin_m;
  e.reason = v.reason;
  e.action = fence.breach_action;
  e.request_rtl = fence.breach_action == BreachAction::AutoRtl;
  return e;
}

}  // namespace webgcs::safety
