#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mav/messages.hpp"
#include "util/clock.hpp"

namespace webgcs::commands {

using CommandId = uint64_t;

enum class CommandKind { Arm, Disarm, Takeoff, Land, Rtl, SetMode, Goto };

const char* to_string(CommandKind kind) noexcept;
std::optional<CommandKind> parse_command_kind(std::string_view text) noexcept;

struct FlightCommand {
  CommandId id = 0;  // 0: assigned on submit
  CommandKind kind = CommandKind::Arm;
  double alt_m = 0.0;  // TAKEOFF target, GOTO relative altitude
  double lat = 0.0;    // GOTO, degrees
  double lon = 0.0;    // GOTO, degrees
  std::string mode;    // SET_MODE
  bool force = false;  // DISARM in flight
  TimePoint issued_at{};

  static FlightCommand of(CommandKind kind) {
    FlightCommand c;
    c.kind = kind;
    return c;
  }
  static FlightCommand arm() { return of(CommandKind::Arm); }
  static FlightCommand disarm(bool force = false) {
    auto c = of(CommandKind::Disarm);
    c.force = force;
    return c;
  }
  static FlightCommand takeoff(double alt_m) {
    auto c = of(CommandKind::Takeoff);
    c.alt_m = alt_m;
    return c;
  }
  static FlightCommand land() { return of(CommandKind::Land); }
  static FlightCommand rtl() { return of(CommandKind::Rtl); }
  static FlightCommand set_mode(std::string mode) {
    auto c = of(CommandKind::SetMode);
    c.mode = std::move(mode);
    return c;
  }
  static FlightCommand go_to(double lat, double lon, double rel_alt_m) {
    auto c = of(CommandKind::Goto);
    c.lat = lat;
    c.lon = lon;
    c.alt_m = rel_alt_m;
    return c;
  }

  // Empty when the command satisfies its invariants, otherwise the problem.
  std::optional<std::string> validate() const;
};

enum class OutcomeStatus { Accepted, Rejected, Timeout, FenceDenied, PreconditionFailed };

const char* to_string(OutcomeStatus status) noexcept;

struct CommandOutcome {
  CommandId id = 0;
  CommandKind kind = CommandKind::Arm;
  OutcomeStatus status = OutcomeStatus::Accepted;
  int result_code = 0;  // MAV_RESULT for Rejected
  std::string reason;
  TimePoint resolved_at{};
  std::optional<CommandId> implicit_for;  // set on commands the GCS issued on its own
};

struct Target {
  uint8_t sys_id = 1;
  uint8_t comp_id = 1;
};

class TranslateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Wire message for a command. Throws TranslateError on unknown mode names or
// out-of-range values.
mav::Message translate(const FlightCommand& cmd, Target target = {});

}  // namespace webgcs::commands
