#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "commands/flight_command.hpp"
#include "link/link_monitor.hpp"
#include "link/endpoint.hpp"
#include "safety/geofence.hpp"
#include "telemetry/telemetry_store.hpp"

namespace webgcs::gateway {

using Json = nlohmann::json;

// Missing values serialize as null; `stale` carries one flag per group.
Json to_json(const telemetry::TelemetrySnapshot& s, const telemetry::StalenessReport& stale);
Json to_json(const commands::CommandOutcome& o);
Json to_json(const safety::FenceConfig& f);
Json to_json(const safety::BreachEvent& b);
Json to_json(const link::LinkTransition& t);
Json link_json(const link::LinkState& state, const std::optional<link::Endpoint>& endpoint);

struct ParsedCommand {
  std::optional<commands::FlightCommand> command;
  Json errors = Json::object();  // field -> message
};

// Request body of POST /api/command. Missing TAKEOFF altitude falls back to
// `takeoff_default_m`; GOTO altitude falls back to `current_alt_m` when known.
ParsedCommand parse_command(const Json& body, double takeoff_default_m, std::optional<double> current_alt_m);

// PUT /api/fence body; fields not present keep their value. Returns field
// errors (empty object when the update applied).
Json apply_fence_update(const Json& body, safety::FenceConfig& fence);

}  // namespace webgcs::gateway
