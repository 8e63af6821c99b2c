#include "commands/flight_command.hpp"

#include <cctype>
#include <cmath>

#include "telemetry/flight_mode.hpp"

namespace webgcs::commands {

const char* to_string(CommandKind kind) noexcept {
  switch (kind) {
    case CommandKind::Arm: return "arm";
    case CommandKind::Disarm: return "disarm";
    case CommandKind::Takeoff: return "takeoff";
    case CommandKind::Land: return "land";
    case CommandKind::Rtl: return "rtl";
    case CommandKind::SetMode: return "set_mode";
    case CommandKind::Goto: return "goto";
  }
  return "unknown";
}

std::optional<CommandKind> parse_command_kind(std::string_view text) noexcept {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "arm") return CommandKind::Arm;
  if (lower == "disarm") return CommandKind::Disarm;
  if (lower == "takeoff") return CommandKind::Takeoff;
  if (lower == "land") return CommandKind::Land;
  if (lower == "rtl") return CommandKind::Rtl;
  if (lower == "set_mode" || lower == "mode") return CommandKind::SetMode;
  if (lower == "goto") return CommandKind::Goto;
  return std::nullopt;
}

const char* to_string(OutcomeStatus status) noexcept {
  switch (status) {
    case OutcomeStatus::Accepted: return "ACCEPTED";
    case OutcomeStatus::Rejected: return "REJECTED";
    case OutcomeStatus::Timeout: return "TIMEOUT";
    case OutcomeStatus::FenceDenied: return "FENCE_DENIED";
    case OutcomeStatus::PreconditionFailed: return "PRECONDITION_FAILED";
  }
  return "UNKNOWN";
}

std::optional<std::string> FlightCommand::validate() const {
  switch (kind) {
    case CommandKind::Takeoff:
      if (!std::isfinite(alt_m) || alt_m <= 0.0) return "alt_m must be > 0";
      break;
    case CommandKind::Goto:
      if (!std::isfinite(lat) || std::abs(lat) > 90.0) return "lat must be within [-90, 90]";
      if (!std::isfinite(lon) || std::abs(lon) > 180.0) return "lon must be within [-180, 180]";
      if (!std::isfinite(alt_m)) return "alt_m must be finite";
      break;
    case CommandKind::SetMode:
      if (!telemetry::copter_mode_number(mode)) return "unknown mode '" + mode + "'";
      break;
    default:
      break;
  }
  return std::nullopt;
}

mav::Message translate(const FlightCommand& cmd, Target target) {
  using namespace mav::enums;
  if (auto problem = cmd.validate()) throw TranslateError(*problem);

  mav::CommandLong c;
  c.target_system = target.sys_id;
  c.target_component = target.comp_id;
  switch (cmd.kind) {
    case CommandKind::Arm:
      c.command = kCmdComponentArmDisarm;
      c.param1 = 1.0f;
      return c;
    case CommandKind::Disarm:
      c.command = kCmdComponentArmDisarm;
      c.param1 = 0.0f;
      if (cmd.force) c.param2 = static_cast<float>(kForceDisarmMagic);
      return c;
    case CommandKind::Takeoff:
      c.command = kCmdNavTakeoff;
      c.param7 = static_cast<float>(cmd.alt_m);
      return c;
    case CommandKind::Land:
      c.command = kCmdNavLand;
      return c;
    case CommandKind::Rtl:
      c.command = kCmdNavReturnToLaunch;
      return c;
    case CommandKind::SetMode:
      c.command = kCmdDoSetMode;
      c.param1 = static_cast<float>(kModeFlagCustomModeEnabled);
      c.param2 = static_cast<float>(*telemetry::copter_mode_number(cmd.mode));
      return c;
    case CommandKind::Goto: {
      mav::SetPositionTargetGlobalInt t;
      t.target_system = target.sys_id;
      t.target_component = target.comp_id;
      t.coordinate_frame = kFrameGlobalRelativeAltInt;
      t.type_mask = kTypeMaskPositionOnly;
      t.lat_int = static_cast<int32_t>(std::llround(cmd.lat * 1e7));
      t.lon_int = static_cast<int32_t>(std::llround(cmd.lon * 1e7));
      t.alt = static_cast<float>(cmd.alt_m);
      return t;
    }
  }
  throw TranslateError("unsupported command kind");
}

}  // namespace webgcs::commands
