#include "sim/sim_vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "telemetry/flight_mode.hpp"

namespace webgcs::sim {
namespace {

using namespace mav::enums;
namespace copter = telemetry::copter;

bool known_mode(uint32_t mode) {
  auto modes = telemetry::copter_modes();
  return std::any_of(modes.begin(), modes.end(), [&](const auto& m) { return m.number == mode; });
}

double yaw_from_heading(double heading_deg) {
  double rad = heading_deg * std::numbers::pi / 180.0;
  rad = std::remainder(rad, 2.0 * std::numbers::pi);
  return rad <= -std::numbers::pi ? rad + 2.0 * std::numbers::pi : rad;
}

}  // namespace

const char* to_string(SimPhase phase) noexcept {
  switch (phase) {
    case SimPhase::Idle: return "IDLE";
    case SimPhase::TakingOff: return "TAKING_OFF";
    case SimPhase::Flying: return "FLYING";
    case SimPhase::Returning: return "RETURNING";
    case SimPhase::Landing: return "LANDING";
  }
  return "UNKNOWN";
}

SimVehicle::SimVehicle(SimParams params) : params_(params) {
  state_.pos = params_.home;
  state_.home = params_.home;
  state_.mode = copter::kStabilize;
  state_.battery_voltage = params_.battery_full_v;
}

uint8_t SimVehicle::ack_arm_disarm(const mav::CommandLong& c) {
  if (c.param1 == 1.0f) {
    if (state_.armed || state_.phase != SimPhase::Idle) return kResultFailed;
    state_.armed = true;
    state_.home = state_.pos;
    return kResultAccepted;
  }
  if (c.param1 != 0.0f) return kResultFailed;
  const bool forced = c.param2 == static_cast<float>(kForceDisarmMagic);
  if (state_.armed && state_.rel_alt > 0.0 && !forced) return kResultFailed;
  state_.armed = false;
  state_.phase = SimPhase::Idle;
  state_.rel_alt = 0.0;
  state_.target.reset();
  state_.groundspeed = 0.0;
  state_.climb_rate = 0.0;
  return kResultAccepted;
}

std::optional<mav::CommandAck> SimVehicle::handle_command(const mav::Message& msg) {
  if (const auto* t = std::get_if<mav::SetPositionTargetGlobalInt>(&msg)) {
    if (state_.armed && state_.mode == copter::kGuided && airborne()) {
      state_.target = SimTarget{{t->lat_int * 1e-7, t->lon_int * 1e-7}, std::max(0.0, double(t->alt))};
      state_.phase = SimPhase::Flying;
    }
    return std::nullopt;
  }

  const auto* c = std::get_if<mav::CommandLong>(&msg);
  if (c == nullptr || !params_.ack_commands) return std::nullopt;

  mav::CommandAck ack;
  ack.command = c->command;
  if (params_.deny_commands) {
    ack.result = kResultFailed;
    return ack;
  }

  switch (c->command) {
    case kCmdComponentArmDisarm:
      ack.result = ack_arm_disarm(*c);
      break;
    case kCmdNavTakeoff:
      if (state_.armed && state_.mode == copter::kGuided && c->param7 > 0.0f &&
          (state_.phase == SimPhase::Idle || state_.rel_alt <= 0.0)) {
        state_.takeoff_alt = c->param7;
        state_.phase = SimPhase::TakingOff;
        ack.result = kResultAccepted;
      } else {
        ack.result = kResultFailed;
      }
      break;
    case kCmdDoSetMode: {
      const auto mode = static_cast<uint32_t>(c->param2);
      if (c->param2 < 0.0f || !known_mode(mode)) {
        ack.result = kResultFailed;
        break;
      }
      state_.mode = mode;
      if (state_.armed && mode == copter::kRtl) state_.phase = SimPhase::Returning;
      if (state_.armed && mode == copter::kLand) state_.phase = SimPhase::Landing;
      if (state_.armed && state_.phase == SimPhase::Flying && mode != copter::kGuided) {
        state_.target = SimTarget{state_.pos, state_.rel_alt};
      }
      ack.result = kResultAccepted;
      break;
    }
    case kCmdNavReturnToLaunch:
      if (!state_.armed) {
        ack.result = kResultFailed;
        break;
      }
      state_.mode = copter::kRtl;
      state_.phase = SimPhase::Returning;
      ack.result = kResultAccepted;
      break;
    case kCmdNavLand:
      if (!state_.armed) {
        ack.result = kResultFailed;
        break;
      }
      state_.mode = copter::kLand;
      state_.phase = SimPhase::Landing;
      ack.result = kResultAccepted;
      break;
    default:
      ack.result = kResultUnsupported;
      break;
  }
  return ack;
}

std::pair<double, bool> SimVehicle::move_toward(const SimTarget& target, double available) {
  const double distance = geo::distance_m(state_.pos, target.position);
  const double dz = target.rel_alt - state_.rel_alt;
  const double t_h = distance / params_.cruise_speed;
  const double vrate = dz >= 0.0 ? params_.climb_rate : params_.descent_rate;
  const double t_v = std::abs(dz) / vrate;
  const double needed = std::max(t_h, t_v);

  if (distance > 0.0) state_.heading_deg = geo::bearing_deg(state_.pos, target.position);
  if (needed <= available) {
    state_.pos = target.position;
    state_.rel_alt = target.rel_alt;
    state_.groundspeed = needed > 0.0 ? params_.cruise_speed : 0.0;
    state_.climb_rate = 0.0;
    return {needed, true};
  }
  if (t_h > available) {
    state_.pos = geo::destination(state_.pos, state_.heading_deg, params_.cruise_speed * available);
    state_.groundspeed = params_.cruise_speed;
  } else {
    state_.pos = target.position;
    state_.groundspeed = 0.0;
  }
  if (t_v > available) {
    state_.rel_alt += (dz >= 0.0 ? 1.0 : -1.0) * vrate * available;
    state_.climb_rate = (dz >= 0.0 ? 1.0 : -1.0) * vrate;
  } else {
    state_.rel_alt = target.rel_alt;
    state_.climb_rate = 0.0;
  }
  return {available, false};
}

const SimState& SimVehicle::step(double dt) {
  double remaining = dt;
  while (remaining > 0.0) {
    const bool armed_at_start = state_.armed;
    double used = remaining;
    switch (state_.phase) {
      case SimPhase::Idle:
        state_.groundspeed = 0.0;
        state_.climb_rate = 0.0;
        break;
      case SimPhase::TakingOff: {
        const double needed = std::max(0.0, state_.takeoff_alt - state_.rel_alt) / params_.climb_rate;
        state_.groundspeed = 0.0;
        if (needed <= remaining) {
          used = needed;
          state_.rel_alt = state_.takeoff_alt;
          state_.climb_rate = 0.0;
          state_.phase = SimPhase::Flying;
          state_.target = SimTarget{state_.pos, state_.takeoff_alt};
        } else {
          state_.rel_alt += params_.climb_rate * remaining;
          state_.climb_rate = params_.climb_rate;
        }
        break;
      }
      case SimPhase::Flying: {
        if (!state_.target) state_.target = SimTarget{state_.pos, state_.rel_alt};
        auto [t, arrived] = move_toward(*state_.target, remaining);
        if (arrived && t < remaining) state_.groundspeed = 0.0;  // hovering for the rest
        break;
      }
      case SimPhase::Returning: {
        auto [t, arrived] = move_toward(SimTarget{state_.home, state_.rel_alt}, remaining);
        used = t;
        if (arrived) {
          state_.phase = SimPhase::Landing;
          state_.groundspeed = 0.0;
          state_.target.reset();
        }
        break;
      }
      case SimPhase::Landing: {
        const double needed = state_.rel_alt / params_.descent_rate;
        state_.groundspeed = 0.0;
        if (needed <= remaining) {
          used = needed;
          state_.rel_alt = 0.0;
          state_.climb_rate = 0.0;
          state_.armed = false;
          state_.phase = SimPhase::Idle;
          state_.target.reset();
        } else {
          state_.rel_alt -= params_.descent_rate * remaining;
          state_.climb_rate = -params_.descent_rate;
        }
        break;
      }
    }
    if (armed_at_start) {
      state_.battery_voltage = std::max(0.0, state_.battery_voltage - params_.battery_drain_v_per_s * used);
    }
    sim_time_ += used;
    remaining -= used;
  }
  return state_;
}

mav::Heartbeat SimVehicle::heartbeat() const {
  mav::Heartbeat hb;
  hb.custom_mode = state_.mode;
  hb.type = kTypeQuadrotor;
  hb.autopilot = kAutopilotArdupilotMega;
  hb.base_mode = kModeFlagCustomModeEnabled | (state_.armed ? kModeFlagSafetyArmed : 0);
  hb.system_status = state_.armed ? kStateActive : kStateStandby;
  hb.mavlink_version = 3;
  return hb;
}

mav::GlobalPositionInt SimVehicle::global_position(double now_s) const {
  mav::GlobalPositionInt p;
  const double heading_rad = state_.heading_deg * std::numbers::pi / 180.0;
  p.time_boot_ms = static_cast<uint32_t>(std::llround(now_s * 1000.0));
  p.lat = static_cast<int32_t>(std::llround(state_.pos.lat * 1e7));
  p.lon = static_cast<int32_t>(std::llround(state_.pos.lon * 1e7));
  p.alt = static_cast<int32_t>(std::llround((params_.home_amsl_m + state_.rel_alt) * 1000.0));
  p.relative_alt = static_cast<int32_t>(std::llround(state_.rel_alt * 1000.0));
  p.vx = static_cast<int16_t>(std::lround(state_.groundspeed * std::cos(heading_rad) * 100.0));
  p.vy = static_cast<int16_t>(std::lround(state_.groundspeed * std::sin(heading_rad) * 100.0));
  p.vz = static_cast<int16_t>(std::lround(-state_.climb_rate * 100.0));
  p.hdg = static_cast<uint16_t>(std::lround(state_.heading_deg * 100.0) % 36000);
  return p;
}

std::vector<mav::Message> SimVehicle::emit_due_messages(double now_s) {
  std::vector<mav::Message> out;
  const std::array<double, 5> rates{params_.heartbeat_hz, params_.position_hz, params_.hud_hz, params_.sys_status_hz,
                                    params_.sys_status_hz};
  const auto boot_ms = static_cast<uint32_t>(std::llround(now_s * 1000.0));
  for (size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0.0 || now_s < next_due_[i]) continue;
    const double period = 1.0 / rates[i];
    next_due_[i] += period;
    if (next_due_[i] <= now_s - period) next_due_[i] = now_s + period;

    switch (i) {
      case 0:
        out.emplace_back(heartbeat());
        break;
      case 1: {
        out.emplace_back(global_position(now_s));
        mav::Attitude a;
        a.time_boot_ms = boot_ms;
        a.yaw = static_cast<float>(yaw_from_heading(state_.heading_deg));
        out.emplace_back(a);
        break;
      }
      case 2: {
        mav::VfrHud h;
        h.airspeed = static_cast<float>(state_.groundspeed);
        h.groundspeed = static_cast<float>(state_.groundspeed);
        h.alt = static_cast<float>(params_.home_amsl_m + state_.rel_alt);
        h.climb = static_cast<float>(state_.climb_rate);
        h.heading = static_cast<int16_t>(std::lround(state_.heading_deg) % 360);
        h.throttle = static_cast<uint16_t>(!state_.armed ? 0 : (state_.rel_alt > 0.0 ? 50 : 10));
        out.emplace_back(h);
        break;
      }
      case 3: {
        mav::SysStatus s;
        s.voltage_battery = static_cast<uint16_t>(std::lround(state_.battery_voltage * 1000.0));
        s.current_battery = static_cast<int16_t>(state_.armed ? 1500 : 50);
        const double span = params_.battery_full_v - params_.battery_empty_v;
        const double pct = span > 0.0 ? (state_.battery_voltage - params_.battery_empty_v) / span * 100.0 : 0.0;
        s.battery_remaining = static_cast<int8_t>(std::clamp(std::lround(pct), 0L, 100L));
        out.emplace_back(s);
        break;
      }
      case 4: {
        mav::GpsRawInt g;
        g.time_usec = static_cast<uint64_t>(std::llround(now_s * 1e6));
        g.lat = static_cast<int32_t>(std::llround(state_.pos.lat * 1e7));
        g.lon = static_cast<int32_t>(std::llround(state_.pos.lon * 1e7));
        g.alt = static_cast<int32_t>(std::llround((params_.home_amsl_m + state_.rel_alt) * 1000.0));
        g.eph = 80;
        g.epv = 120;
        g.vel = static_cast<uint16_t>(std::lround(state_.groundspeed * 100.0));
        g.cog = static_cast<uint16_t>(std::lround(state_.heading_deg * 100.0) % 36000);
        g.fix_type = 3;
        g.satellites_visible = 10;
        out.emplace_back(g);
        break;
      }
    }
  }
  return out;
}

}  // namespace webgcs::sim
