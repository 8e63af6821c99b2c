#pragma once

// MAVLink message subset understood by the codec.
//
// Field layouts and CRC_EXTRA values are taken from the MAVLink "common"
// message set (message_definitions/v1.0/common.xml). Fields are listed in
// wire order: sorted by type size, largest first, stable within a size.
// Only base (non-extension) fields are modelled; kMaxLen records the length
// including extensions so longer payloads from real autopilots are accepted.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>

namespace webgcs::mav {

template <class Msg, class T>
struct FieldDef {
  const char* name;
  T Msg::*member;
};

template <class Msg, class T>
constexpr FieldDef<Msg, T> field(const char* name, T Msg::*member) {
  return {name, member};
}

struct Heartbeat {
  static constexpr uint32_t kId = 0;
  static constexpr const char* kName = "HEARTBEAT";
  static constexpr uint8_t kCrcExtra = 50;
  static constexpr uint8_t kMaxLen = 9;

  uint32_t custom_mode{};
  uint8_t type{};
  uint8_t autopilot{};
  uint8_t base_mode{};
  uint8_t system_status{};
  uint8_t mavlink_version{};

  static constexpr auto fields() {
    return std::make_tuple(field("custom_mode", &Heartbeat::custom_mode), field("type", &Heartbeat::type),
                           field("autopilot", &Heartbeat::autopilot), field("base_mode", &Heartbeat::base_mode),
                           field("system_status", &Heartbeat::system_status),
                           field("mavlink_version", &Heartbeat::mavlink_version));
  }
  bool operator==(const Heartbeat&) const = default;
};

struct SysStatus {
  static constexpr uint32_t kId = 1;
  static constexpr const char* kName = "SYS_STATUS";
  static constexpr uint8_t kCrcExtra = 124;
  static constexpr uint8_t kMaxLen = 43;

  uint32_t onboard_control_sensors_present{};
  uint32_t onboard_control_sensors_enabled{};
  uint32_t onboard_control_sensors_health{};
  uint16_t load{};
  uint16_t voltage_battery{};  // mV
  int16_t current_battery{};   // cA, -1 unknown
  uint16_t drop_rate_comm{};
  uint16_t errors_comm{};
  uint16_t errors_count1{};
  uint16_t errors_count2{};
  uint16_t errors_count3{};
  uint16_t errors_count4{};
  int8_t battery_remaining{};  // %, -1 unknown

  static constexpr auto fields() {
    return std::make_tuple(
        field("onboard_control_sensors_present", &SysStatus::onboard_control_sensors_present),
        field("onboard_control_sensors_enabled", &SysStatus::onboard_control_sensors_enabled),
        field("onboard_control_sensors_health", &SysStatus::onboard_control_sensors_health),
        field("load", &SysStatus::load), field("voltage_battery", &SysStatus::voltage_battery),
        field("current_battery", &SysStatus::current_battery), field("drop_rate_comm", &SysStatus::drop_rate_comm),
        field("errors_comm", &SysStatus::errors_comm), field("errors_count1", &SysStatus::errors_count1),
        field("errors_count2", &SysStatus::errors_count2), field("errors_count3", &SysStatus::errors_count3),
        field("errors_count4", &SysStatus::errors_count4),
        field("battery_remaining", &SysStatus::battery_remaining));
  }
  bool operator==(const SysStatus&) const = default;
};

struct GpsRawInt {
  static constexpr uint32_t kId = 24;
  static constexpr const char* kName = "GPS_RAW_INT";
  static constexpr uint8_t kCrcExtra = 24;
  static constexpr uint8_t kMaxLen = 52;

  uint64_t time_usec{};
  int32_t lat{};  // degE7
  int32_t lon{};  // degE7
  int32_t alt{};  // mm AMSL
  uint16_t eph{};
  uint16_t epv{};
  uint16_t vel{};  // cm/s
  uint16_t cog{};  // cdeg
  uint8_t fix_type{};
  uint8_t satellites_visible{};

  static constexpr auto fields() {
    return std::make_tuple(field("time_usec", &GpsRawInt::time_usec), field("lat", &GpsRawInt::lat),
                           field("lon", &GpsRawInt::lon), field("alt", &GpsRawInt::alt),
                           field("eph", &GpsRawInt::eph), field("epv", &GpsRawInt::epv),
                           field("vel", &GpsRawInt::vel), field("cog", &GpsRawInt::cog),
                           field("fix_type", &GpsRawInt::fix_type),
                           field("satellites_visible", &GpsRawInt::satellites_visible));
  }
  bool operator==(const GpsRawInt&) const = default;
};

struct Attitude {
  static constexpr uint32_t kId = 30;
  static constexpr const char* kName = "ATTITUDE";
  static constexpr uint8_t kCrcExtra = 39;
  static constexpr uint8_t kMaxLen = 28;

  uint32_t time_boot_ms{};
  float roll{};
  float pitch{};
  float yaw{};
  float rollspeed{};
  float pitchspeed{};
  float yawspeed{};

  static constexpr auto fields() {
    return std::make_tuple(field("time_boot_ms", &Attitude::time_boot_ms), field("roll", &Attitude::roll),
                           field("pitch", &Attitude::pitch), field("yaw", &Attitude::yaw),
                           field("rollspeed", &Attitude::rollspeed), field("pitchspeed", &Attitude::pitchspeed),
                           field("yawspeed", &Attitude::yawspeed));
  }
  bool operator==(const Attitude&) const = default;
};

struct GlobalPositionInt {
  static constexpr uint32_t kId = 33;
  static constexpr const char* kName = "GLOBAL_POSITION_INT";
  static constexpr uint8_t kCrcExtra = 104;
  static constexpr uint8_t kMaxLen = 28;

  uint32_t time_boot_ms{};
  int32_t lat{};           // degE7
  int32_t lon{};           // degE7
  int32_t alt{};           // mm AMSL
  int32_t relative_alt{};  // mm above home
  int16_t vx{};            // cm/s north
  int16_t vy{};            // cm/s east
  int16_t vz{};            // cm/s down
  uint16_t hdg{};          // cdeg, UINT16_MAX unknown

  static constexpr auto fields() {
    return std::make_tuple(field("time_boot_ms", &GlobalPositionInt::time_boot_ms),
                           field("lat", &GlobalPositionInt::lat), field("lon", &GlobalPositionInt::lon),
                           field("alt", &GlobalPositionInt::alt),
                           field("relative_alt", &GlobalPositionInt::relative_alt),
                           field("vx", &GlobalPositionInt::vx), field("vy", &GlobalPositionInt::vy),
                           field("vz", &GlobalPositionInt::vz), field("hdg", &GlobalPositionInt::hdg));
  }
  bool operator==(const GlobalPositionInt&) const = default;
};

struct VfrHud {
  static constexpr uint32_t kId = 74;
  static constexpr const char* kName = "VFR_HUD";
  static constexpr uint8_t kCrcExtra = 20;
  static constexpr uint8_t kMaxLen = 20;

  float airspeed{};
  float groundspeed{};
  float alt{};
  float climb{};
  int16_t heading{};
  uint16_t throttle{};

  static constexpr auto fields() {
    return std::make_tuple(field("airspeed", &VfrHud::airspeed), field("groundspeed", &VfrHud::groundspeed),
                           field("alt", &VfrHud::alt), field("climb", &VfrHud::climb),
                           field("heading", &VfrHud::heading), field("throttle", &VfrHud::throttle));
  }
  bool operator==(const VfrHud&) const = default;
};

struct CommandLong {
  static constexpr uint32_t kId = 76;
  static constexpr const char* kName = "COMMAND_LONG";
  static constexpr uint8_t kCrcExtra = 152;
  static constexpr uint8_t kMaxLen = 33;

  float param1{};
  float param2{};
  float param3{};
  float param4{};
  float param5{};
  float param6{};
  float param7{};
  uint16_t command{};
  uint8_t target_system{};
  uint8_t target_component{};
  uint8_t confirmation{};

  static constexpr auto fields() {
    return std::make_tuple(field("param1", &CommandLong::param1), field("param2", &CommandLong::param2),
                           field("param3", &CommandLong::param3), field("param4", &CommandLong::param4),
                           field("param5", &CommandLong::param5), field("param6", &CommandLong::param6),
                           field("param7", &CommandLong::param7), field("command", &CommandLong::command),
                           field("target_system", &CommandLong::target_system),
                           field("target_component", &CommandLong::target_component),
                           field("confirmation", &CommandLong::confirmation));
  }
  bool operator==(const CommandLong&) const = default;
};

struct CommandAck {
  static constexpr uint32_t kId = 77;
  static constexpr const char* kName = "COMMAND_ACK";
  static constexpr uint8_t kCrcExtra = 143;
  static constexpr uint8_t kMaxLen = 10;

  uint16_t command{};
  uint8_t result{};

  static constexpr auto fields() {
    return std::make_tuple(field("command", &CommandAck::command), field("result", &CommandAck::result));
  }
  bool operator==(const CommandAck&) const = default;
};

struct SetPositionTargetGlobalInt {
  static constexpr uint32_t kId = 86;
  static constexpr const char* kName = "SET_POSITION_TARGET_GLOBAL_INT";
  static constexpr uint8_t kCrcExtra = 5;
  static constexpr uint8_t kMaxLen = 53;

  uint32_t time_boot_ms{};
  int32_t lat_int{};  // degE7
  int32_t lon_int{};  // degE7
  float alt{};        // m, frame dependent
  float vx{};
  float vy{};
  float vz{};
  float afx{};
  float afy{};
  float afz{};
  float yaw{};
  float yaw_rate{};
  uint16_t type_mask{};
  uint8_t target_system{};
  uint8_t target_component{};
  uint8_t coordinate_frame{};

  static constexpr auto fields() {
    using M = SetPositionTargetGlobalInt;
    return std::make_tuple(field("time_boot_ms", &M::time_boot_ms), field("lat_int", &M::lat_int),
                           field("lon_int", &M::lon_int), field("alt", &M::alt), field("vx", &M::vx),
                           field("vy", &M::vy), field("vz", &M::vz), field("afx", &M::afx), field("afy", &M::afy),
                           field("afz", &M::afz), field("yaw", &M::yaw), field("yaw_rate", &M::yaw_rate),
                           field("type_mask", &M::type_mask), field("target_system", &M::target_system),
                           field("target_component", &M::target_component),
                           field("coordinate_frame", &M::coordinate_frame));
  }
  bool operator==(const SetPositionTargetGlobalInt&) const = default;
};

struct StatusText {
  static constexpr uint32_t kId = 253;
  static constexpr const char* kName = "STATUSTEXT";
  static constexpr uint8_t kCrcExtra = 83;
  static constexpr uint8_t kMaxLen = 54;

  uint8_t severity{};
  std::array<char, 50> text{};

  static constexpr auto fields() {
    return std::make_tuple(field("severity", &StatusText::severity), field("text", &StatusText::text));
  }
  bool operator==(const StatusText&) const = default;

  // Text is NUL-terminated only when shorter than 50 characters.
  std::string text_string() const {
    std::string_view view(text.data(), text.size());
    return std::string(view.substr(0, view.find('\0')));
  }
  void set_text(std::string_view s) {
    text.fill('\0');
    s.copy(text.data(), std::min(s.size(), text.size()));
  }
};

using Message = std::variant<Heartbeat, SysStatus, GpsRawInt, Attitude, GlobalPositionInt, VfrHud, CommandLong,
                             CommandAck, SetPositionTargetGlobalInt, StatusText>;

inline uint32_t message_id(const Message& m) {
  return std::visit([](const auto& v) { return std::decay_t<decltype(v)>::kId; }, m);
}

inline const char* message_name(const Message& m) {
  return std::visit([](const auto& v) { return std::decay_t<decltype(v)>::kName; }, m);
}

// MAVLink enum values used across the project.
namespace enums {
inline constexpr uint8_t kModeFlagCustomModeEnabled = 0x01;
inline constexpr uint8_t kModeFlagSafetyArmed = 0x80;

inline constexpr uint8_t kAutopilotGeneric = 0;
inline constexpr uint8_t kAutopilotArdupilotMega = 3;
inline constexpr uint8_t kAutopilotInvalid = 8;

inline constexpr uint8_t kTypeQuadrotor = 2;
inline constexpr uint8_t kTypeGcs = 6;

inline constexpr uint8_t kStateStandby = 3;
inline constexpr uint8_t kStateActive = 4;

inline constexpr uint16_t kCmdNavReturnToLaunch = 20;
inline constexpr uint16_t kCmdNavLand = 21;
inline constexpr uint16_t kCmdNavTakeoff = 22;
inline constexpr uint16_t kCmdDoSetMode = 176;
inline constexpr uint16_t kCmdComponentArmDisarm = 400;

inline constexpr uint8_t kResultAccepted = 0;
inline constexpr uint8_t kResultTemporarilyRejected = 1;
inline constexpr uint8_t kResultDenied = 2;
inline constexpr uint8_t kResultUnsupported = 3;
inline constexpr uint8_t kResultFailed = 4;

inline constexpr uint8_t kFrameGlobalRelativeAltInt = 6;
// Ignore velocity, acceleration, yaw and yaw rate: position only.
inline constexpr uint16_t kTypeMaskPositionOnly = 0x0FF8;

inline constexpr uint16_t kForceDisarmMagic = 21196;
}  // namespace enums

}  // namespace webgcs::mav
