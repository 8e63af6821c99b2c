#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "wait_signal.hpp"
#include "webgcs/webgcs.h"

namespace {

struct Options {
  std::string bind = "0.0.0.0";
  int port = 5000;
  std::string drone;
  double fence_radius_m = 100.0;
  double fence_alt_m = 50.0;
  std::string breach_action = "auto_rtl";
  std::string ui_dir;
  double takeoff_default_m = 15.24;
};

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? v : nullptr;
}

// Environment wins over the command line.
bool apply_env(Options& o, std::string& error) {
  try {
    if (auto v = env("WEBGCS_BIND")) o.bind = v;
    if (auto v = env("WEBGCS_PORT")) o.port = std::stoi(v);
    if (auto v = env("WEBGCS_DRONE")) o.drone = v;
    if (auto v = env("WEBGCS_FENCE_RADIUS_M")) o.fence_radius_m = std::stod(v);
    if (auto v = env("WEBGCS_FENCE_ALT_M")) o.fence_alt_m = std::stod(v);
    if (auto v = env("WEBGCS_BREACH_ACTION")) o.breach_action = v;
    if (auto v = env("WEBGCS_UI_DIR")) o.ui_dir = v;
    if (auto v = env("WEBGCS_TAKEOFF_DEFAULT_M")) o.takeoff_default_m = std::stod(v);
  } catch (const std::exception&) {
    error = "malformed WEBGCS_ environment variable";
    return false;
  }
  if (o.port < 0 || o.port > 65535) {
    error = "port out of range";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Web ground control station for MAVLink vehicles"};
  app.add_option("--port", o.port, "HTTP/WebSocket port")->capture_default_str();
  app.add_option("--bind", o.bind, "Listen address")->capture_default_str();
  app.add_option("--drone", o.drone, "Vehicle address to connect at startup (host:port, tcp://host:port, serial:/dev/x@baud)");
  app.add_option("--fence-radius-m", o.fence_radius_m, "Geofence radius around home")->capture_default_str();
  app.add_option("--fence-alt-m", o.fence_alt_m, "Geofence ceiling above home")->capture_default_str();
  app.add_option("--breach-action", o.breach_action, "warn, deny_only or auto_rtl")->capture_default_str();
  app.add_option("--ui-dir", o.ui_dir, "Directory with the cockpit UI bundle");
  app.add_option("--takeoff-default-m", o.takeoff_default_m, "Takeoff altitude when none is given")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::string error;
  if (!apply_env(o, error)) {
    std::fprintf(stderr, "webgcs: %s\n", error.c_str());
    return 2;
  }

  webgcs_service_config config;
  webgcs_service_config_init(&config);
  config.bind_address = o.bind.c_str();
  config.port = static_cast<uint16_t>(o.port);
  config.ui_dir = o.ui_dir.empty() ? nullptr : o.ui_dir.c_str();
  config.fence_radius_m = o.fence_radius_m;
  config.fence_alt_m = o.fence_alt_m;
  config.breach_action = o.breach_action.c_str();
  config.takeoff_default_m = o.takeoff_default_m;

  const sigset_t signals = block_stop_signals();
  webgcs_service* service = nullptr;
  if (webgcs_service_create(&config, &service) != WEBGCS_OK || webgcs_service_start(service) != WEBGCS_OK) {
    std::fprintf(stderr, "webgcs: %s\n", webgcs_last_error());
    webgcs_service_destroy(service);
    return 1;
  }
  std::printf("webgcs listening on http://%s:%u\n", o.bind.c_str(), webgcs_service_port(service));
  std::printf("warning: no authentication; anyone who can reach this port can fly the vehicle\n");
  if (!o.drone.empty()) {
    if (webgcs_service_connect(service, o.drone.c_str(), 0) != WEBGCS_OK) {
      std::fprintf(stderr, "webgcs: --drone %s: %s\n", o.drone.c_str(), webgcs_last_error());
    } else {
      std::printf("connecting to %s\n", o.drone.c_str());
    }
  }
  std::fflush(stdout);

  wait_stop_signal(signals);
  webgcs_service_destroy(service);
  return 0;
}
