#include <doctest.h>

#include <cstring>
#include <map>
#include <random>

#include "commands/command_manager.hpp"
#include "mav/codec.hpp"

using namespace webgcs;
using namespace webgcs::commands;
using namespace std::chrono_literals;

namespace {

const LatLon kHome{33.6461, -117.8427};
const TimePoint t0{std::chrono::hours(3)};

telemetry::TelemetrySnapshot vehicle(bool armed, uint32_t mode, double rel_alt, double speed = 0.0) {
  telemetry::TelemetrySnapshot s;
  s.link = link::LinkPhase::Connected;
  s.armed.set(armed, t0);
  s.mode.set(telemetry::decode_flight_mode(mode, mav::enums::kAutopilotArdupilotMega), t0);
  s.lat.set(kHome.lat, t0);
  s.lon.set(kHome.lon, t0);
  s.rel_alt.set(rel_alt, t0);
  s.groundspeed.set(speed, t0);
  return s;
}

safety::FenceConfig home_fence() {
  safety::FenceConfig f;
  f.home = kHome;
  return f;
}

struct Harness {
  std::vector<mav::Message> sent;
  bool link_ok = true;
  CommandManager mgr{[this](const mav::Message& m) {
    if (!link_ok) return false;
    sent.push_back(m);
    return true;
  }};

  std::vector<std::vector<uint8_t>> wire_bytes() const {
    std::vector<std::vector<uint8_t>> out;
    for (const auto& m : sent) out.push_back(mav::pack_message(m));
    return out;
  }
};

mav::CommandAck ack(uint16_t command, uint8_t result) {
  mav::CommandAck a{};
  a.command = command;
  a.result = result;
  return a;
}

}  // namespace

TEST_CASE("translation of each command") {
  const Target tgt{7, 1};
  auto takeoff = std::get<mav::CommandLong>(translate(FlightCommand::takeoff(15.24), tgt));
  CHECK(takeoff.command == 22);
  CHECK(takeoff.param7 == 15.24f);
  CHECK(takeoff.target_system == 7);
  CHECK(takeoff.target_component == 1);

  auto go = std::get<mav::SetPositionTargetGlobalInt>(translate(FlightCommand::go_to(33.7, -117.8, 20.0)));
  CHECK(go.lat_int == 337000000);
  CHECK(go.lon_int == -1178000000);
  CHECK(go.alt == 20.0f);
  CHECK(go.coordinate_frame == 6);
  CHECK(go.type_mask == 0x0FF8);

  auto mode = std::get<mav::CommandLong>(translate(FlightCommand::set_mode("GUIDED")));
  CHECK(mode.command == 176);
  CHECK(mode.param1 == 1.0f);
  CHECK(mode.param2 == 4.0f);

  auto arm = std::get<mav::CommandLong>(translate(FlightCommand::arm()));
  CHECK(arm.command == 400);
  CHECK(arm.param1 == 1.0f);
  auto disarm = std::get<mav::CommandLong>(translate(FlightCommand::disarm()));
  CHECK(disarm.param1 == 0.0f);
  CHECK(disarm.param2 == 0.0f);
  CHECK(std::get<mav::CommandLong>(translate(FlightCommand::disarm(true))).param2 == 21196.0f);
  CHECK(std::get<mav::CommandLong>(translate(FlightCommand::rtl())).command == 20);
  CHECK(std::get<mav::CommandLong>(translate(FlightCommand::land())).command == 21);

  CHECK_THROWS_AS(translate(FlightCommand::set_mode("WARP")), TranslateError);
  CHECK_THROWS_AS(translate(FlightCommand::takeoff(-5.0)), TranslateError);
  CHECK_THROWS_AS(translate(FlightCommand::takeoff(0.0)), TranslateError);
  CHECK_THROWS_AS(translate(FlightCommand::go_to(91.0, 0.0, 10.0)), TranslateError);
  CHECK_THROWS_AS(translate(FlightCommand::go_to(0.0, std::nan(""), 10.0)), TranslateError);
}

TEST_CASE("unanswered command: three identical sends then TIMEOUT at 3 s") {
  Harness h;
  auto r = h.mgr.submit(FlightCommand::arm(), vehicle(false, 4, 0.0), home_fence(), {}, t0);
  CHECK(r.outcomes.empty());
  CHECK(h.sent.size() == 1);

  std::vector<CommandOutcome> outcomes;
  TimePoint resolved{};
  for (auto t = t0; t <= t0 + 5s; t += 10ms) {
    for (auto& o : h.mgr.tick(t)) {
      outcomes.push_back(o);
      resolved = t;
    }
  }
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].id == r.id);
  CHECK(outcomes[0].status == OutcomeStatus::Timeout);
  CHECK(std::abs(seconds_between(t0, resolved) - 3.0) <= 0.25);
  const auto frames = h.wire_bytes();
  REQUIRE(frames.size() == 3);
  CHECK(frames[0] == frames[1]);
  CHECK(frames[1] == frames[2]);
  CHECK(h.mgr.pending() == 0);
}

TEST_CASE("ACK after a resend resolves and stops resending") {
  Harness h;
  auto r = h.mgr.submit(FlightCommand::arm(), vehicle(false, 4, 0.0), home_fence(), {}, t0);
  CHECK(h.mgr.tick(t0 + 1s).empty());
  CHECK(h.sent.size() == 2);
  auto out = h.mgr.process_ack(ack(400, 0), t0 + 1200ms);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == r.id);
  CHECK(out[0].status == OutcomeStatus::Accepted);
  for (auto t = t0 + 1200ms; t < t0 + 6s; t += 100ms) CHECK(h.mgr.tick(t).empty());
  CHECK(h.sent.size() == 2);
  // A late duplicate has nothing to match.
  CHECK(h.mgr.process_ack(ack(400, 0), t0 + 6s).empty());
  CHECK(h.mgr.unmatched_acks() == 1);
}

TEST_CASE("vehicle refusal carries the result code") {
  Harness h;
  h.mgr.submit(FlightCommand::arm(), vehicle(false, 4, 0.0), home_fence(), {}, t0);
  auto out = h.mgr.process_ack(ack(400, 4), t0 + 100ms);
  REQUIRE(out.size() == 1);
  CHECK(out[0].status == OutcomeStatus::Rejected);
  CHECK(out[0].result_code == 4);
  CHECK(h.mgr.process_ack(ack(22, 0), t0 + 200ms).empty());
  CHECK(h.mgr.unmatched_acks() == 1);
}

TEST_CASE("preconditions are checked before anything is sent") {
  Harness h;
  auto f = home_fence();
  auto expect_fail = [&](FlightCommand c, const telemetry::TelemetrySnapshot& s, std::string_view reason) {
    auto r = h.mgr.submit(std::move(c), s, f, {}, t0);
    REQUIRE(r.outcomes.size() == 1);
    CHECK(r.outcomes[0].status == OutcomeStatus::PreconditionFailed);
    CHECK(r.outcomes[0].reason == reason);
  };
  expect_fail(FlightCommand::takeoff(15.24), vehicle(false, 4, 0.0), "not armed");
  expect_fail(FlightCommand::go_to(kHome.lat, kHome.lon, 10.0), vehicle(false, 4, 0.0), "not armed");
  expect_fail(FlightCommand::go_to(kHome.lat, kHome.lon, 10.0), vehicle(true, 4, 0.5), "not airborne");
  expect_fail(FlightCommand::disarm(), vehicle(true, 4, 10.0), "not landed");
  expect_fail(FlightCommand::disarm(), vehicle(true, 4, 0.2, 3.0), "not landed");
  auto down = vehicle(true, 4, 10.0);
  down.link = link::LinkPhase::Lost;
  expect_fail(FlightCommand::rtl(), down, "link down");
  CHECK(h.sent.empty());
  CHECK(h.mgr.pending() == 0);

  // Forced disarm in the air and a landed disarm both go out.
  CHECK(h.mgr.submit(FlightCommand::disarm(true), vehicle(true, 4, 10.0), f, {}, t0).outcomes.empty());
  CHECK(h.mgr.submit(FlightCommand::disarm(), vehicle(true, 4, 0.2, 0.1), f, {}, t0).outcomes.empty());
  CHECK(h.sent.size() == 2);
}

TEST_CASE("fence denial sends nothing") {
  Harness h;
  auto r = h.mgr.submit(FlightCommand::go_to(kHome.lat + 0.001, kHome.lon, 15.24), vehicle(true, 4, 15.24),
                        home_fence(), {}, t0);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].status == OutcomeStatus::FenceDenied);
  CHECK(h.sent.empty());

  safety::FenceConfig no_home;
  r = h.mgr.submit(FlightCommand::go_to(kHome.lat, kHome.lon, 15.0), vehicle(true, 4, 15.24), no_home, {}, t0);
  CHECK(r.outcomes[0].status == OutcomeStatus::FenceDenied);
  CHECK(h.sent.empty());
}

TEST_CASE("GOTO inside the fence resolves on delivery") {
  Harness h;
  auto r = h.mgr.submit(FlightCommand::go_to(kHome.lat + 0.0005, kHome.lon, 15.24), vehicle(true, 4, 15.24),
                        home_fence(), {}, t0);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].status == OutcomeStatus::Accepted);
  REQUIRE(h.sent.size() == 1);
  CHECK(std::holds_alternative<mav::SetPositionTargetGlobalInt>(h.sent[0]));
}

TEST_CASE("takeoff outside GUIDED switches mode first") {
  Harness h;
  auto r = h.mgr.submit(FlightCommand::takeoff(15.24), vehicle(true, 0, 0.0), home_fence(), {}, t0);
  CHECK(r.outcomes.empty());
  REQUIRE(h.sent.size() == 1);
  CHECK(std::get<mav::CommandLong>(h.sent[0]).command == 176);

  auto out = h.mgr.process_ack(ack(176, 0), t0 + 100ms);
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == CommandKind::SetMode);
  CHECK(out[0].implicit_for == r.id);
  REQUIRE(h.sent.size() == 2);
  CHECK(std::get<mav::CommandLong>(h.sent[1]).command == 22);

  out = h.mgr.process_ack(ack(22, 0), t0 + 200ms);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == r.id);
  CHECK(out[0].status == OutcomeStatus::Accepted);
  CHECK_FALSE(out[0].implicit_for);

  // Mode change refused: the takeoff fails without being sent.
  Harness h2;
  auto r2 = h2.mgr.submit(FlightCommand::takeoff(15.24), vehicle(true, 0, 0.0), home_fence(), {}, t0);
  out = h2.mgr.process_ack(ack(176, 4), t0 + 100ms);
  REQUIRE(out.size() == 2);
  CHECK(out[1].id == r2.id);
  CHECK(out[1].status == OutcomeStatus::PreconditionFailed);
  CHECK(h2.sent.size() == 1);
}

TEST_CASE("a dead link at send time fails the command immediately") {
  Harness h;
  h.link_ok = false;
  auto r = h.mgr.submit(FlightCommand::rtl(), vehicle(true, 4, 10.0), home_fence(), {}, t0);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].status == OutcomeStatus::PreconditionFailed);
  CHECK(h.mgr.pending() == 0);
}

TEST_CASE("every submitted command gets exactly one outcome") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 50; ++round) {
    Harness h;
    std::map<CommandId, int> outcomes;
    std::vector<CommandId> submitted;
    auto record = [&](const std::vector<CommandOutcome>& os) {
      for (const auto& o : os) ++outcomes[o.id];
    };
    std::uniform_int_distribution<int> kind(0, 6), coin(0, 3), result(0, 4);
    TimePoint t = t0;
    for (int step = 0; step < 200; ++step) {
      t += 50ms;
      h.link_ok = coin(rng) != 0;
      if (coin(rng) == 0) {
        FlightCommand c;
        switch (kind(rng)) {
          case 0: c = FlightCommand::arm(); break;
          case 1: c = FlightCommand::disarm(coin(rng) == 0); break;
          case 2: c = FlightCommand::takeoff(coin(rng) == 0 ? -1.0 : 15.24); break;
          case 3: c = FlightCommand::land(); break;
          case 4: c = FlightCommand::rtl(); break;
          case 5: c = FlightCommand::set_mode(coin(rng) == 0 ? "WARP" : "LOITER"); break;
          default: c = FlightCommand::go_to(kHome.lat + 0.002 * (coin(rng) - 1.5), kHome.lon, 15.0); break;
        }
        auto r = h.mgr.submit(c, vehicle(coin(rng) != 0, coin(rng) == 0 ? 0 : 4, coin(rng) * 10.0), home_fence(), {},
                              t);
        submitted.push_back(r.id);
        record(r.outcomes);
      }
      if (!h.sent.empty() && coin(rng) == 0) {
        if (const auto* c = std::get_if<mav::CommandLong>(&h.sent[std::uniform_int_distribution<size_t>(
                                0, h.sent.size() - 1)(rng)])) {
          record(h.mgr.process_ack(ack(c->command, static_cast<uint8_t>(result(rng))), t));
        }
      }
      record(h.mgr.tick(t));
    }
    for (int i = 0; i < 100; ++i) record(h.mgr.tick(t += 100ms));
    CHECK(h.mgr.pending() == 0);
    for (CommandId id : submitted) {
      CAPTURE(id);
      REQUIRE(outcomes[id] == 1);
    }
    for (const auto& [id, n] : outcomes) REQUIRE(n == 1);
  }
}
