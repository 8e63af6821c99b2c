#include "webgcs/webgcs.h"

#include <cstring>
#include <memory>
#include <string>

#include "gateway/gcs_service.hpp"
#include "gateway/http_gateway.hpp"
#include "mav/crc.hpp"
#include "sim/sim_server.hpp"
#include "telemetry/flight_mode.hpp"

using namespace webgcs;

struct webgcs_service {
  std::unique_ptr<gateway::GcsService> service;
  std::unique_ptr<gateway::HttpGateway> http;
  bool started = false;
};

struct webgcs_sim {
  std::unique_ptr<sim::SimServer> server;
};

namespace {

thread_local std::string g_last_error;

webgcs_status fail(webgcs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

webgcs_status ok() {
  g_last_error.clear();
  return WEBGCS_OK;
}

webgcs_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf == nullptr || cap < text.size() + 1) {
    if (buf && cap > 0) buf[0] = '\0';
    return fail(WEBGCS_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return ok();
}

template <class F>
webgcs_status guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return fail(WEBGCS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WEBGCS_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* webgcs_last_error(void) { return g_last_error.c_str(); }

const char* webgcs_version(void) { return "0.1.0"; }

const char* webgcs_status_string(webgcs_status status) {
  switch (status) {
    case WEBGCS_OK: return "ok";
    case WEBGCS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WEBGCS_ERR_BAD_ADDRESS: return "bad address";
    case WEBGCS_ERR_CONFLICT: return "conflict";
    case WEBGCS_ERR_LINK_DOWN: return "link down";
    case WEBGCS_ERR_IO: return "i/o error";
    case WEBGCS_ERR_STATE: return "invalid state";
    case WEBGCS_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case WEBGCS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

uint16_t webgcs_crc_x25(const uint8_t* data, size_t len, uint16_t seed) {
  if (data == nullptr) return seed;
  return mav::crc_x25(std::span(data, len), seed);
}

void webgcs_service_config_init(webgcs_service_config* c) {
  if (c == nullptr) return;
  c->bind_address = "0.0.0.0";
  c->port = 5000;
  c->ui_dir = nullptr;
  c->fence_radius_m = 100.0;
  c->fence_alt_m = 50.0;
  c->breach_action = "auto_rtl";
  c->takeoff_default_m = 15.24;
  c->http_threads = 2;
}

webgcs_status webgcs_service_create(const webgcs_service_config* config, webgcs_service** out) {
  if (out == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  webgcs_service_config c;
  webgcs_service_config_init(&c);
  if (config) c = *config;

  return guarded([&] {
    gateway::ServiceConfig sc;
    sc.fence.radius_m = c.fence_radius_m;
    sc.fence.max_alt_m = c.fence_alt_m;
    if (!sc.fence.valid()) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "fence radius and altitude must be positive");
    if (c.breach_action) {
      auto action = safety::parse_breach_action(c.breach_action);
      if (!action) return fail(WEBGCS_ERR_INVALID_ARGUMENT, std::string("unknown breach action ") + c.breach_action);
      sc.fence.breach_action = *action;
    }
    if (!(c.takeoff_default_m > 0.0)) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "takeoff default must be positive");
    sc.takeoff_default_m = c.takeoff_default_m;

    gateway::GatewayConfig gc;
    if (c.bind_address) gc.bind_address = c.bind_address;
    gc.port = c.port;
    if (c.ui_dir) gc.ui_dir = c.ui_dir;
    if (c.http_threads > 0) gc.threads = c.http_threads;

    auto handle = std::make_unique<webgcs_service>();
    handle->service = std::make_unique<gateway::GcsService>(sc);
    handle->http = std::make_unique<gateway::HttpGateway>(*handle->service, gc);
    *out = handle.release();
    return ok();
  });
}

webgcs_status webgcs_service_start(webgcs_service* s) {
  if (s == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "service is null");
  if (s->started) return fail(WEBGCS_ERR_STATE, "already started");
  return guarded([&] {
    std::string error;
    if (!s->http->start(error)) return fail(WEBGCS_ERR_IO, error);
    s->service->start();
    s->started = true;
    return ok();
  });
}

uint16_t webgcs_service_port(const webgcs_service* s) { return s ? s->http->port() : 0; }

void webgcs_service_stop(webgcs_service* s) {
  if (s == nullptr || !s->started) return;
  s->http->stop();
  s->service->stop();
  s->started = false;
}

void webgcs_service_destroy(webgcs_service* s) {
  if (s == nullptr) return;
  webgcs_service_stop(s);
  s->http.reset();
  s->service.reset();
  delete s;
}

webgcs_status webgcs_service_connect(webgcs_service* s, const char* address, int force) {
  if (s == nullptr || address == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto r = s->service->connect(address, force != 0);
    switch (r.status) {
      case gateway::ConnectStatus::Accepted: return ok();
      case gateway::ConnectStatus::BadAddress: return fail(WEBGCS_ERR_BAD_ADDRESS, r.message);
      case gateway::ConnectStatus::ArmedNeedsForce: return fail(WEBGCS_ERR_CONFLICT, r.message);
      case gateway::ConnectStatus::Failed: break;
    }
    return fail(WEBGCS_ERR_INTERNAL, r.message);
  });
}

webgcs_status webgcs_service_disconnect(webgcs_service* s) {
  if (s == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "service is null");
  return guarded([&] {
    s->service->disconnect();
    return ok();
  });
}

webgcs_status webgcs_service_state_json(webgcs_service* s, char* buf, size_t cap, size_t* needed) {
  if (s == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "service is null");
  return guarded([&] { return copy_out(s->service->state_json().dump(), buf, cap, needed); });
}

webgcs_status webgcs_service_command_json(webgcs_service* s, const char* request_json, uint64_t* token) {
  if (s == nullptr || request_json == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto body = gateway::Json::parse(request_json, nullptr, false);
    if (body.is_discarded()) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "invalid JSON");
    auto parsed =
        gateway::parse_command(body, s->service->takeoff_default_m(), s->service->snapshot().rel_alt.value);
    if (!parsed.command) return fail(WEBGCS_ERR_INVALID_ARGUMENT, parsed.errors.dump());
    auto sub = s->service->submit(std::move(*parsed.command));
    if (sub.status == gateway::SubmitStatus::LinkDown) return fail(WEBGCS_ERR_LINK_DOWN, "link down");
    if (token) *token = sub.token;
    return ok();
  });
}

webgcs_status webgcs_service_outcome_json(webgcs_service* s, uint64_t token, char* buf, size_t cap, size_t* needed) {
  if (s == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "service is null");
  return guarded([&] {
    auto o = s->service->outcome(token);
    if (!o) return fail(WEBGCS_ERR_STATE, "no outcome for token " + std::to_string(token));
    return copy_out(gateway::to_json(*o).dump(), buf, cap, needed);
  });
}

void webgcs_sim_config_init(webgcs_sim_config* c) {
  if (c == nullptr) return;
  c->bind_address = "0.0.0.0";
  c->port = 5760;
  c->lat = 33.6461;
  c->lon = -117.8427;
  c->time_scale = 1.0;
  c->ack_commands = 1;
  c->deny_commands = 0;
}

webgcs_status webgcs_sim_create(const webgcs_sim_config* config, webgcs_sim** out) {
  if (out == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  webgcs_sim_config c;
  webgcs_sim_config_init(&c);
  if (config) c = *config;
  if (!geo::valid({c.lat, c.lon})) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "spawn point out of range");
  if (!(c.time_scale > 0.0)) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "time scale must be positive");
  return guarded([&] {
    sim::SimParams params;
    params.home = {c.lat, c.lon};
    params.time_scale = c.time_scale;
    params.ack_commands = c.ack_commands != 0;
    params.deny_commands = c.deny_commands != 0;
    sim::SimServerConfig sc;
    if (c.bind_address) sc.bind_address = c.bind_address;
    sc.port = c.port;
    auto handle = std::make_unique<webgcs_sim>();
    handle->server = std::make_unique<sim::SimServer>(params, sc);
    *out = handle.release();
    return ok();
  });
}

webgcs_status webgcs_sim_start(webgcs_sim* s) {
  if (s == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "sim is null");
  if (s->server->running()) return fail(WEBGCS_ERR_STATE, "already started");
  return guarded([&] {
    std::string error;
    if (!s->server->start(error)) return fail(WEBGCS_ERR_IO, error);
    return ok();
  });
}

uint16_t webgcs_sim_port(const webgcs_sim* s) { return s ? s->server->port() : 0; }

void webgcs_sim_stop(webgcs_sim* s) {
  if (s) s->server->stop();
}

void webgcs_sim_destroy(webgcs_sim* s) {
  if (s == nullptr) return;
  s->server->stop();
  delete s;
}

webgcs_status webgcs_sim_state_json(webgcs_sim* s, char* buf, size_t cap, size_t* needed) {
  if (s == nullptr) return fail(WEBGCS_ERR_INVALID_ARGUMENT, "sim is null");
  return guarded([&] {
    const auto st = s->server->state();
    gateway::Json j{{"lat", st.pos.lat},
                    {"lon", st.pos.lon},
                    {"rel_alt", st.rel_alt},
                    {"home", {{"lat", st.home.lat}, {"lon", st.home.lon}}},
                    {"armed", st.armed},
                    {"mode", telemetry::decode_flight_mode(st.mode, mav::enums::kAutopilotArdupilotMega).name},
                    {"phase", sim::to_string(st.phase)},
                    {"battery_voltage", st.battery_voltage},
                    {"sim_time", s->server->sim_time()}};
    return copy_out(j.dump(), buf, cap, needed);
  });
}

}  // extern "C"
