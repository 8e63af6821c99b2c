#include "gateway/json_codec.hpp"

#include <cmath>

namespace webgcs::gateway {
namespace {

template <class T>
Json value_or_null(const telemetry::Tracked<T>& t) {
  return t.value ? Json(*t.value) : Json(nullptr);
}

bool stale(telemetry::Freshness f) { return f == telemetry::Freshness::Stale; }

std::optional<double> number_field(const Json& body, const char* key, Json& errors) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    errors[key] = "must be a number";
    return std::nullopt;
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) {
    errors[key] = "must be finite";
    return std::nullopt;
  }
  return v;
}

}  // namespace

Json to_json(const telemetry::TelemetrySnapshot& s, const telemetry::StalenessReport& st) {
  Json j;
  j["lat"] = value_or_null(s.lat);
  j["lon"] = value_or_null(s.lon);
  j["rel_alt"] = value_or_null(s.rel_alt);
  j["abs_alt"] = value_or_null(s.abs_alt);
  j["heading"] = value_or_null(s.heading);
  j["boot_time_ms"] = value_or_null(s.boot_time_ms);
  j["roll"] = value_or_null(s.roll);
  j["pitch"] = value_or_null(s.pitch);
  j["yaw"] = value_or_null(s.yaw);
  j["groundspeed"] = value_or_null(s.groundspeed);
  j["airspeed"] = value_or_null(s.airspeed);
  j["throttle"] = value_or_null(s.throttle);
  j["battery_voltage"] = value_or_null(s.battery_voltage);
  j["battery_remaining"] = value_or_null(s.battery_remaining);
  j["gps_fix"] = s.gps_fix.value ? Json(telemetry::to_string(*s.gps_fix.value)) : Json(nullptr);
  j["satellites"] = value_or_null(s.satellites);
  j["mode"] = s.mode.value ? Json(s.mode.value->name) : Json(nullptr);
  j["custom_mode"] = s.mode.value ? Json(s.mode.value->custom_mode) : Json(nullptr);
  j["armed"] = value_or_null(s.armed);
  j["autopilot"] = s.autopilot;
  j["vehicle_type"] = s.vehicle_type;
  j["link"] = link::to_string(s.link);
  if (s.home) {
    j["home"] = {{"lat", s.home->position.lat}, {"lon", s.home->position.lon}, {"abs_alt", s.home->abs_alt}};
  } else {
    j["home"] = nullptr;
  }
  j["stale"] = {{"position", stale(st.position)}, {"attitude", stale(st.attitude)}, {"hud", stale(st.hud)},
                {"battery", stale(st.battery)},   {"gps", stale(st.gps)},           {"heartbeat", stale(st.heartbeat)}};
  return j;
}

Json to_json(const commands::CommandOutcome& o) {
  Json j{{"token", o.id},
         {"kind", commands::to_string(o.kind)},
         {"status", commands::to_string(o.status)},
         {"result_code", o.result_code},
         {"reason", o.reason}};
  j["implicit_for"] = o.implicit_for ? Json(*o.implicit_for) : Json(nullptr);
  return j;
}

Json to_json(const safety::FenceConfig& f) {
  Json j{{"radius_m", f.radius_m}, {"max_alt_m", f.max_alt_m}, {"breach_action", safety::to_string(f.breach_action)}};
  j["home"] = f.home ? Json{{"lat", f.home->lat}, {"lon", f.home->lon}} : Json(nullptr);
  return j;
}

Json to_json(const safety::BreachEvent& b) {
  return Json{{"distance_m", b.distance_m},
              {"rel_alt_m", b.rel_alt_m},
              {"margin_m", b.margin_m},
              {"reason", b.reason},
              {"action", safety::to_string(b.action)},
              {"rtl_requested", b.request_rtl}};
}

Json to_json(const link::LinkTransition& t) {
  return Json{{"from", link::to_string(t.from)}, {"to", link::to_string(t.to)}, {"reason", t.reason}};
}

Json link_json(const link::LinkState& state, const std::optional<link::Endpoint>& endpoint) {
  Json j{{"phase", link::to_string(state.phase)}};
  j["endpoint"] = endpoint ? Json(endpoint->to_string()) : Json(nullptr);
  j["remote_sys_id"] = state.remote_sys_id;
  j["remote_comp_id"] = state.remote_comp_id;
  return j;
}

ParsedCommand parse_command(const Json& body, double takeoff_default_m, std::optional<double> current_alt_m) {
  ParsedCommand out;
  Json& errors = out.errors;
  if (!body.is_object()) {
    errors["body"] = "must be a JSON object";
    return out;
  }
  auto kind_it = body.find("kind");
  if (kind_it == body.end() || !kind_it->is_string()) {
    errors["kind"] = "required string";
    return out;
  }
  auto kind = commands::parse_command_kind(kind_it->get<std::string>());
  if (!kind) {
    errors["kind"] = "unknown command kind";
    return out;
  }

  auto cmd = commands::FlightCommand::of(*kind);
  const auto alt = number_field(body, "alt_m", errors);
  switch (*kind) {
    case commands::CommandKind::Takeoff:
      cmd.alt_m = alt.value_or(takeoff_default_m);
      break;
    case commands::CommandKind::Goto: {
      const auto lat = number_field(body, "lat", errors);
      const auto lon = number_field(body, "lon", errors);
      if (!lat && !errors.contains("lat")) errors["lat"] = "required";
      if (!lon && !errors.contains("lon")) errors["lon"] = "required";
      cmd.lat = lat.value_or(0.0);
      cmd.lon = lon.value_or(0.0);
      if (alt) {
        cmd.alt_m = *alt;
      } else if (current_alt_m) {
        cmd.alt_m = *current_alt_m;
      } else {
        cmd.alt_m = takeoff_default_m;
      }
      break;
    }
    case commands::CommandKind::SetMode: {
      auto it = body.find("mode");
      if (it == body.end() || !it->is_string()) {
        errors["mode"] = "required string";
      } else {
        cmd.mode = it->get<std::string>();
      }
      break;
    }
    case commands::CommandKind::Disarm: {
      auto it = body.find("force");
      if (it != body.end() && !it->is_boolean()) {
        errors["force"] = "must be a boolean";
      } else if (it != body.end()) {
        cmd.force = it->get<bool>();
      }
      break;
    }
    default:
      break;
  }
  if (!errors.empty()) return out;

  if (auto problem = cmd.validate()) {
    const char* field = "command";
    switch (*kind) {
      case commands::CommandKind::Takeoff: field = "alt_m"; break;
      case commands::CommandKind::Goto: field = "position"; break;
      case commands::CommandKind::SetMode: field = "mode"; break;
      default: break;
    }
    errors[field] = *problem;
    return out;
  }
  try {
    commands::translate(cmd);
  } catch (const commands::TranslateError& e) {
    errors[*kind == commands::CommandKind::SetMode ? "mode" : "command"] = e.what();
    return out;
  }
  out.command = std::move(cmd);
  return out;
}

Json apply_fence_update(const Json& body, safety::FenceConfig& fence) {
  Json errors = Json::object();
  if (!body.is_object()) {
    errors["body"] = "must be a JSON object";
    return errors;
  }
  safety::FenceConfig next = fence;
  if (auto r = number_field(body, "radius_m", errors)) next.radius_m = *r;
  if (auto a = number_field(body, "max_alt_m", errors)) next.max_alt_m = *a;
  if (auto it = body.find("breach_action"); it != body.end()) {
    auto action = it->is_string() ? safety::parse_breach_action(it->get<std::string>()) : std::nullopt;
    if (action) {
      next.breach_action = *action;
    } else {
      errors["breach_action"] = "one of warn, deny_only, auto_rtl";
    }
  }
  if (auto it = body.find("home"); it != body.end()) {
    if (it->is_null()) {
      next.home.reset();
    } else if (it->is_object()) {
      Json sub = Json::object();
      auto lat = number_field(*it, "lat", sub);
      auto lon = number_field(*it, "lon", sub);
      if (lat && lon && geo::valid({*lat, *lon})) {
        next.home = LatLon{*lat, *lon};
      } else {
        errors["home"] = "needs valid lat and lon";
      }
    } else {
      errors["home"] = "must be an object or null";
    }
  }
  if (!(next.radius_m > 0.0)) errors["radius_m"] = "must be positive";
  if (!(next.max_alt_m > 0.0)) errors["max_alt_m"] = "must be positive";
  if (errors.empty()) fence = next;
  return errors;
}

}  // namespace webgcs::gateway
