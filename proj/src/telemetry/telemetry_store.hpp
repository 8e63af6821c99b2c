#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

#include "link/link_monitor.hpp"
#include "mav/messages.hpp"
#include "safety/geo.hpp"
#include "telemetry/flight_mode.hpp"
#include "util/clock.hpp"

namespace webgcs::telemetry {

// A value plus the time it was last written. `updated` empty means never
// received. A received-but-unknown value (battery -1) has updated set and
// value empty.
template <class T>
struct Tracked {
  std::optional<T> value;
  std::optional<TimePoint> updated;

  void set(std::optional<T> v, TimePoint now) {
    value = std::move(v);
    updated = now;
  }
  bool ever_updated() const noexcept { return updated.has_value(); }
  bool operator==(const Tracked&) const = default;
};

enum class GpsFix : uint8_t { NoGps = 0, NoFix = 1, Fix2D = 2, Fix3D = 3, Dgps = 4, RtkFloat = 5, RtkFixed = 6, Static = 7, Ppp = 8 };

const char* to_string(GpsFix fix) noexcept;

struct HomePosition {
  LatLon position;
  double abs_alt = 0.0;  // m AMSL
  bool operator==(const HomePosition&) const = default;
};

struct TelemetrySnapshot {
  // position (GLOBAL_POSITION_INT)
  Tracked<double> lat;      // deg
  Tracked<double> lon;      // deg
  Tracked<double> rel_alt;  // m above home
  Tracked<double> abs_alt;  // m AMSL
  Tracked<double> heading;  // deg [0, 360)
  Tracked<uint32_t> boot_time_ms;
  // attitude (ATTITUDE)
  Tracked<double> roll;   // rad
  Tracked<double> pitch;  // rad
  Tracked<double> yaw;    // rad (-pi, pi]
  // hud (VFR_HUD)
  Tracked<double> groundspeed;  // m/s
  Tracked<double> airspeed;     // m/s
  Tracked<double> throttle;     // %
  // battery (SYS_STATUS)
  Tracked<double> battery_voltage;    // V
  Tracked<double> battery_remaining;  // %
  // gps (GPS_RAW_INT)
  Tracked<GpsFix> gps_fix;
  Tracked<int> satellites;
  // heartbeat
  Tracked<FlightMode> mode;
  Tracked<bool> armed;
  uint8_t autopilot = mav::enums::kAutopilotInvalid;
  uint8_t vehicle_type = 0;

  link::LinkPhase link = link::LinkPhase::Disconnected;
  std::optional<HomePosition> home;

  std::optional<LatLon> position() const {
    if (!lat.value || !lon.value) return std::nullopt;
    return LatLon{*lat.value, *lon.value};
  }
  bool is_armed() const noexcept { return armed.value.value_or(false); }
  bool operator==(const TelemetrySnapshot&) const = default;
};

enum class Freshness { Fresh, Stale };

struct StalenessReport {
  Freshness position = Freshness::Stale;
  Freshness attitude = Freshness::Stale;
  Freshness hud = Freshness::Stale;
  Freshness battery = Freshness::Stale;
  Freshness gps = Freshness::Stale;
  Freshness heartbeat = Freshness::Stale;
  bool operator==(const StalenessReport&) const = default;
};

inline constexpr Duration kDefaultStaleAfter = std::chrono::seconds(5);

// Pure fold of one message into a snapshot. Unknown messages are ignored and
// a message never touches fields it does not carry.
TelemetrySnapshot apply_message(TelemetrySnapshot snapshot, const mav::Message& msg, TimePoint now);

StalenessReport staleness(const TelemetrySnapshot& snapshot, TimePoint now, Duration stale_after = kDefaultStaleAfter);

// Single writer, many readers; snapshot() returns a consistent copy.
class TelemetryStore {
 public:
  explicit TelemetryStore(Duration stale_after = kDefaultStaleAfter) : stale_after_(stale_after) {}

  void apply(const mav::Message& msg, TimePoint now);
  void set_link_phase(link::LinkPhase phase);
  // Forget vehicle state for a fresh connection (home is re-acquired).
  void reset();

  TelemetrySnapshot snapshot() const;
  StalenessReport staleness(TimePoint now) const;

 private:
  mutable std::mutex mutex_;
  TelemetrySnapshot snapshot_;
  Duration stale_after_;
};

}  // namespace webgcs::telemetry
