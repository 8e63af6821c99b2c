#include "telemetry/telemetry_store.hpp"

#include <cmath>
#include <numbers>

namespace webgcs::telemetry {
namespace {

double normalize_yaw(double yaw) {
  constexpr double pi = std::numbers::pi;
  if (!std::isfinite(yaw)) return yaw;
  double r = std::remainder(yaw, 2.0 * pi);  // [-pi, pi]
  return r <= -pi ? r + 2.0 * pi : r;
}

void maybe_acquire_home(TelemetrySnapshot& s) {
  if (s.home || !s.gps_fix.value || *s.gps_fix.value < GpsFix::Fix3D) return;
  if (!s.lat.value || !s.lon.value) return;
  s.home = HomePosition{{*s.lat.value, *s.lon.value}, s.abs_alt.value.value_or(0.0)};
}

struct Folder {
  TelemetrySnapshot& s;
  TimePoint now;

  void operator()(const mav::GlobalPositionInt& m) const {
    s.lat.set(m.lat / 1e7, now);
    s.lon.set(m.lon / 1e7, now);
    s.rel_alt.set(m.relative_alt / 1e3, now);
    s.abs_alt.set(m.alt / 1e3, now);
    s.boot_time_ms.set(m.time_boot_ms, now);
    if (m.hdg != UINT16_MAX) s.heading.set(std::fmod(m.hdg / 1e2, 360.0), now);
    maybe_acquire_home(s);
  }
  void operator()(const mav::Attitude& m) const {
    s.roll.set(m.roll, now);
    s.pitch.set(m.pitch, now);
    s.yaw.set(normalize_yaw(m.yaw), now);
  }
  void operator()(const mav::VfrHud& m) const {
    s.airspeed.set(m.airspeed, now);
    s.groundspeed.set(m.groundspeed, now);
    s.throttle.set(m.throttle, now);
  }
  void operator()(const mav::SysStatus& m) const {
    s.battery_voltage.set(m.voltage_battery / 1e3, now);
    s.battery_remaining.set(m.battery_remaining < 0 ? std::nullopt : std::optional<double>(m.battery_remaining), now);
  }
  void operator()(const mav::GpsRawInt& m) const {
    s.gps_fix.set(static_cast<GpsFix>(m.fix_type), now);
    s.satellites.set(m.satellites_visible, now);
    maybe_acquire_home(s);
  }
  void operator()(const mav::Heartbeat& m) const {
    if (m.autopilot == mav::enums::kAutopilotInvalid || m.type == mav::enums::kTypeGcs) return;
    s.autopilot = m.autopilot;
    s.vehicle_type = m.type;
    s.armed.set((m.base_mode & mav::enums::kModeFlagSafetyArmed) != 0, now);
    s.mode.set(decode_flight_mode(m.custom_mode, m.autopilot), now);
  }
  template <class Other>
  void operator()(const Other&) const {}
};

Freshness fresh(const std::optional<TimePoint>& updated, TimePoint now, Duration stale_after) {
  if (!updated || now - *updated > stale_after) return Freshness::Stale;
  return Freshness::Fresh;
}

}  // namespace

const char* to_string(GpsFix fix) noexcept {
  switch (fix) {
    case GpsFix::NoGps: return "NO_GPS";
    case GpsFix::NoFix: return "NO_FIX";
    case GpsFix::Fix2D: return "2D";
    case GpsFix::Fix3D: return "3D";
    case GpsFix::Dgps: return "DGPS";
    case GpsFix::RtkFloat: return "RTK_FLOAT";
    case GpsFix::RtkFixed: return "RTK_FIXED";
    case GpsFix::Static: return "STATIC";
    case GpsFix::Ppp: return "PPP";
  }
  return "UNKNOWN";
}

TelemetrySnapshot apply_message(TelemetrySnapshot snapshot, const mav::Message& msg, TimePoint now) {
  std::visit(Folder{snapshot, now}, msg);
  return snapshot;
}

StalenessReport staleness(const TelemetrySnapshot& s, TimePoint now, Duration stale_after) {
  StalenessReport r;
  r.position = fresh(s.lat.updated, now, stale_after);
  r.attitude = fresh(s.roll.updated, now, stale_after);
  r.hud = fresh(s.groundspeed.updated, now, stale_after);
  r.battery = fresh(s.battery_voltage.updated, now, stale_after);
  r.gps = fresh(s.gps_fix.updated, now, stale_after);
  r.heartbeat = fresh(s.armed.updated, now, stale_after);
  return r;
}

void TelemetryStore::apply(const mav::Message& msg, TimePoint now) {
  std::lock_guard lock(mutex_);
  std::visit(Folder{snapshot_, now}, msg);
}

void TelemetryStore::set_link_phase(link::LinkPhase phase) {
  std::lock_guard lock(mutex_);
  snapshot_.link = phase;
}

void TelemetryStore::reset() {
  std::lock_guard lock(mutex_);
  const auto phase = snapshot_.link;
  snapshot_ = TelemetrySnapshot{};
  snapshot_.link = phase;
}

TelemetrySnapshot TelemetryStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

StalenessReport TelemetryStore::staleness(TimePoint now) const {
  std::lock_guard lock(mutex_);
  return telemetry::staleness(snapshot_, now, stale_after_);
}

}  // namespace webgcs::telemetry
