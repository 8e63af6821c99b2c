#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mav/messages.hpp"
#include "safety/geo.hpp"

namespace webgcs::sim {

enum class SimPhase { Idle, TakingOff, Flying, Returning, Landing };

const char* to_string(SimPhase phase) noexcept;

struct SimParams {
  double climb_rate = 2.0;     // m/s
  double descent_rate = 1.5;   // m/s
  double cruise_speed = 5.0;   // m/s
  double heartbeat_hz = 1.0;
  double position_hz = 4.0;    // GLOBAL_POSITION_INT and ATTITUDE
  double hud_hz = 2.0;
  double sys_status_hz = 1.0;  // SYS_STATUS and GPS_RAW_INT
  double time_scale = 1.0;     // simulated seconds per wall second
  LatLon home{33.6461, -117.8427};
  double home_amsl_m = 20.0;
  double battery_full_v = 12.6;
  double battery_empty_v = 10.5;
  double battery_drain_v_per_s = 0.001;
  // Test behaviours: a deaf vehicle never answers commands, a denying one
  // refuses every COMMAND_LONG.
  bool ack_commands = true;
  bool deny_commands = false;
};

struct SimTarget {
  LatLon position;
  double rel_alt = 0.0;
};

struct SimState {
  LatLon pos;
  double rel_alt = 0.0;
  LatLon home;
  uint32_t mode = 0;  // ArduCopter custom mode
  bool armed = false;
  std::optional<SimTarget> target;
  SimPhase phase = SimPhase::Idle;
  double battery_voltage = 12.6;
  double heading_deg = 0.0;
  double groundspeed = 0.0;
  double climb_rate = 0.0;
  double takeoff_alt = 0.0;
};

// Point-mass copter with piecewise-linear phases; no attitude dynamics.
class SimVehicle {
 public:
  explicit SimVehicle(SimParams params = {});

  // COMMAND_LONG yields an ACK (unless the vehicle is deaf);
  // SET_POSITION_TARGET_GLOBAL_INT is applied or ignored silently.
  std::optional<mav::CommandAck> handle_command(const mav::Message& msg);

  // Advances dt seconds of simulated time. Phase changes inside the interval
  // carry the leftover time into the next phase.
  const SimState& step(double dt);

  // Messages whose period has elapsed at simulated time `now_s`.
  std::vector<mav::Message> emit_due_messages(double now_s);

  const SimState& state() const noexcept { return state_; }
  const SimParams& params() const noexcept { return params_; }
  SimParams& mutable_params() noexcept { return params_; }
  double sim_time() const noexcept { return sim_time_; }

  mav::Heartbeat heartbeat() const;
  mav::GlobalPositionInt global_position(double now_s) const;

 private:
  // Moves toward target for at most `available` seconds; returns time used
  // and whether the target was reached.
  std::pair<double, bool> move_toward(const SimTarget& target, double available);
  uint8_t ack_arm_disarm(const mav::CommandLong& c);
  bool airborne() const noexcept { return state_.rel_alt > 1.0; }

  SimParams params_;
  SimState state_;
  double sim_time_ = 0.0;
  std::array<double, 5> next_due_{};  // heartbeat, position, hud, sys_status, gps
};

}  // namespace webgcs::sim
