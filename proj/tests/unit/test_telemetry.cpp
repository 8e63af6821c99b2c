#include <doctest.h>

#include <atomic>
#include <numbers>
#include <random>
#include <thread>

#include "../support/random_messages.hpp"
#include "telemetry/flight_mode.hpp"
#include "telemetry/telemetry_store.hpp"

using namespace webgcs;
using namespace webgcs::telemetry;
using namespace std::chrono_literals;

namespace {

const TimePoint t0{std::chrono::hours(2)};

mav::Heartbeat ardu_heartbeat(uint8_t base_mode, uint32_t mode) {
  mav::Heartbeat hb{};
  hb.type = mav::enums::kTypeQuadrotor;
  hb.autopilot = mav::enums::kAutopilotArdupilotMega;
  hb.base_mode = base_mode;
  hb.custom_mode = mode;
  return hb;
}

}  // namespace

TEST_CASE("empty snapshot: nothing received, link disconnected, all stale") {
  TelemetryStore store;
  const auto s = store.snapshot();
  CHECK_FALSE(s.lat.ever_updated());
  CHECK_FALSE(s.yaw.ever_updated());
  CHECK_FALSE(s.battery_voltage.ever_updated());
  CHECK_FALSE(s.mode.ever_updated());
  CHECK_FALSE(s.armed.ever_updated());
  CHECK_FALSE(s.home);
  CHECK(s.link == link::LinkPhase::Disconnected);
  const auto r = store.staleness(t0);
  CHECK(r == StalenessReport{});  // every group defaults to stale
  CHECK(r.position == Freshness::Stale);
  CHECK(r.heartbeat == Freshness::Stale);
}

TEST_CASE("position scaling is exact") {
  mav::GlobalPositionInt p{};
  p.lat = 337000000;
  p.lon = -1178427000;
  p.relative_alt = 15240;
  p.alt = 35240;
  p.hdg = 12345;
  p.time_boot_ms = 777;
  const auto s = apply_message({}, p, t0);
  CHECK(*s.lat.value == 33.7);
  CHECK(*s.lon.value == -117.8427);
  CHECK(*s.rel_alt.value == 15.24);
  CHECK(*s.abs_alt.value == 35.24);
  CHECK(*s.heading.value == 123.45);
  CHECK(*s.boot_time_ms.value == 777u);
  CHECK(*s.lat.updated == t0);

  // Unknown heading leaves the previous one alone.
  p.hdg = 65535;
  const auto s2 = apply_message(s, p, t0 + 1s);
  CHECK(*s2.heading.value == *s.heading.value);
  CHECK(*s2.heading.updated == t0);
  CHECK(*s2.lat.updated == t0 + 1s);
}

TEST_CASE("heartbeat sets armed and decodes the mode") {
  auto s = apply_message({}, ardu_heartbeat(0x80 | 0x01, telemetry::copter::kGuided), t0);
  CHECK(s.is_armed());
  CHECK(s.mode.value->name == "GUIDED");
  CHECK(s.mode.value->custom_mode == 4);

  s = apply_message(s, ardu_heartbeat(0x01, telemetry::copter::kRtl), t0);
  CHECK_FALSE(s.is_armed());
  CHECK(s.mode.value->name == "RTL");

  auto generic = ardu_heartbeat(0x80, 4);
  generic.autopilot = mav::enums::kAutopilotGeneric;
  s = apply_message({}, generic, t0);
  CHECK(s.mode.value->name == "UNKNOWN(4)");

  s = apply_message({}, ardu_heartbeat(0, 77), t0);
  CHECK(s.mode.value->name == "UNKNOWN(77)");

  // Another GCS on the link is not the vehicle.
  mav::Heartbeat gcs{};
  gcs.type = mav::enums::kTypeGcs;
  gcs.autopilot = mav::enums::kAutopilotInvalid;
  gcs.base_mode = 0x80;
  CHECK_FALSE(apply_message({}, gcs, t0).armed.ever_updated());
}

TEST_CASE("fields update independently") {
  mav::VfrHud hud{};
  hud.groundspeed = 5.0f;
  hud.airspeed = 4.5f;
  hud.throttle = 42;
  mav::Attitude att{};
  att.yaw = 1.0f;
  auto s = apply_message({}, hud, t0);
  s = apply_message(s, att, t0 + 250ms);
  CHECK(*s.groundspeed.value == 5.0);
  CHECK(*s.throttle.value == 42.0);
  CHECK(*s.yaw.value == doctest::Approx(1.0));
  CHECK(*s.groundspeed.updated == t0);
  CHECK(*s.yaw.updated == t0 + 250ms);
  CHECK_FALSE(s.armed.ever_updated());
}

TEST_CASE("battery conversions and unknown remaining") {
  mav::SysStatus st{};
  st.voltage_battery = 12600;
  st.battery_remaining = 87;
  auto s = apply_message({}, st, t0);
  CHECK(*s.battery_voltage.value == 12.6);
  CHECK(*s.battery_remaining.value == 87.0);
  st.battery_remaining = -1;
  s = apply_message(s, st, t0 + 1s);
  CHECK_FALSE(s.battery_remaining.value);
  CHECK(s.battery_remaining.ever_updated());
}

TEST_CASE("yaw lands in (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  for (float raw : {0.0f, 1.0f, -1.0f, 3.2f, -3.2f, 7.0f, -7.0f, static_cast<float>(pi), static_cast<float>(-pi)}) {
    mav::Attitude a{};
    a.yaw = raw;
    const double y = *apply_message({}, a, t0).yaw.value;
    CAPTURE(raw);
    CHECK(y > -pi);
    CHECK(y <= pi);
    CHECK(std::cos(y) == doctest::Approx(std::cos(static_cast<double>(raw))));
  }
}

TEST_CASE("home is the first 3D-fix position") {
  mav::GlobalPositionInt p{};
  p.lat = 336461000;
  p.lon = -1178427000;
  p.alt = 20000;
  mav::GpsRawInt g{};
  g.fix_type = 2;
  auto s = apply_message({}, p, t0);
  s = apply_message(s, g, t0);
  CHECK_FALSE(s.home);
  g.fix_type = 3;
  s = apply_message(s, g, t0);
  REQUIRE(s.home);
  CHECK(s.home->position.lat == doctest::Approx(33.6461));
  CHECK(s.home->abs_alt == doctest::Approx(20.0));
  p.lat = 336471000;
  s = apply_message(s, p, t0 + 1s);
  CHECK(s.home->position.lat == doctest::Approx(33.6461));
}

TEST_CASE("staleness per group") {
  TelemetryStore store;
  mav::SysStatus st{};
  store.apply(st, t0);
  for (int i = 0; i <= 24; ++i) store.apply(mav::GlobalPositionInt{}, t0 + i * 250ms);
  const auto r = store.staleness(t0 + 6s);
  CHECK(r.position == Freshness::Fresh);
  CHECK(r.battery == Freshness::Stale);
  CHECK(r.attitude == Freshness::Stale);
  // Exactly stale_after old is still fresh.
  CHECK(store.staleness(t0 + 5s).battery == Freshness::Fresh);
}

TEST_CASE("a steady 4 Hz feed never goes stale") {
  TelemetryStore store;
  for (int i = 0; i < 400; ++i) {
    const TimePoint now = t0 + i * 250ms;
    store.apply(mav::GlobalPositionInt{}, now);
    store.apply(mav::Attitude{}, now);
    for (auto probe : {now, now + 100ms, now + 249ms}) {
      const auto r = store.staleness(probe);
      REQUIRE(r.position == Freshness::Fresh);
      REQUIRE(r.attitude == Freshness::Fresh);
    }
  }
}

TEST_CASE("folding is deterministic and never touches uncarried fields") {
  std::mt19937_64 rng(77);
  std::vector<mav::Message> trace;
  for (int i = 0; i < 500; ++i) trace.push_back(testsupport::random_message(rng));

  TelemetrySnapshot a, b;
  for (size_t i = 0; i < trace.size(); ++i) {
    const TimePoint now = t0 + i * 10ms;
    const TelemetrySnapshot before = a;
    a = apply_message(a, trace[i], now);
    b = apply_message(b, trace[i], now);
    if (!std::holds_alternative<mav::Heartbeat>(trace[i])) {
      REQUIRE(a.armed == before.armed);
      REQUIRE(a.mode == before.mode);
    }
    if (!std::holds_alternative<mav::SysStatus>(trace[i])) REQUIRE(a.battery_voltage == before.battery_voltage);
    if (!std::holds_alternative<mav::VfrHud>(trace[i])) REQUIRE(a.groundspeed == before.groundspeed);
    if (!std::holds_alternative<mav::Attitude>(trace[i])) REQUIRE(a.yaw == before.yaw);
    if (!std::holds_alternative<mav::GlobalPositionInt>(trace[i])) REQUIRE(a.lat == before.lat);
  }
  CHECK(a == b);
}

TEST_CASE("concurrent snapshots are always some prefix of the trace") {
  std::mt19937_64 rng(8);
  std::vector<mav::Message> trace;
  for (int i = 0; i < 300; ++i) trace.push_back(testsupport::random_message(rng));
  std::vector<TelemetrySnapshot> prefixes{TelemetrySnapshot{}};
  for (size_t i = 0; i < trace.size(); ++i) prefixes.push_back(apply_message(prefixes.back(), trace[i], t0 + i * 1ms));

  for (int round = 0; round < 5; ++round) {
    TelemetryStore store;
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::atomic<int> reads{0};
    std::atomic<int> ready{0};
    auto reader = [&] {
      size_t last = 0;
      ++ready;
      while (!done || reads < 2) {
        const auto s = store.snapshot();
        // Prefixes only grow, so a later read cannot match an earlier prefix.
        size_t k = last;
        while (k < prefixes.size() && !(prefixes[k] == s)) ++k;
        if (k == prefixes.size()) {
          ++bad;
        } else {
          last = k;
        }
        ++reads;
      }
    };
    std::thread r1(reader), r2(reader);
    while (ready < 2) std::this_thread::yield();
    for (size_t i = 0; i < trace.size(); ++i) store.apply(trace[i], t0 + i * 1ms);
    done = true;
    r1.join();
    r2.join();
    CHECK(bad == 0);
    CHECK(reads > 0);
    CHECK(store.snapshot() == prefixes.back());
  }
}

TEST_CASE("ArduCopter mode table") {
  CHECK(copter_mode_number("GUIDED") == 4u);
  CHECK(copter_mode_number("guided") == 4u);
  CHECK(copter_mode_number("STABILIZE") == 0u);
  CHECK(copter_mode_number("AUTO") == 3u);
  CHECK(copter_mode_number("LOITER") == 5u);
  CHECK(copter_mode_number("RTL") == 6u);
  CHECK(copter_mode_number("LAND") == 9u);
  CHECK_FALSE(copter_mode_number("WARP"));
  CHECK(decode_flight_mode(9, mav::enums::kAutopilotArdupilotMega).name == "LAND");
  CHECK(decode_flight_mode(1000, mav::enums::kAutopilotArdupilotMega).name == "UNKNOWN(1000)");
  for (const auto& m : copter_modes()) {
    CHECK(copter_mode_number(m.name) == m.number);
    CHECK(decode_flight_mode(m.number, mav::enums::kAutopilotArdupilotMega).name == m.name);
  }
}
