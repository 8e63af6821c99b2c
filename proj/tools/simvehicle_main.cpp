#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "wait_signal.hpp"
#include "webgcs/webgcs.h"

int main(int argc, char** argv) {
  webgcs_sim_config config;
  webgcs_sim_config_init(&config);
  std::string bind = config.bind_address;
  bool deaf = false;
  bool deny = false;

  CLI::App app{"Simulated MAVLink copter served over TCP"};
  app.add_option("--port", config.port, "TCP listen port")->capture_default_str();
  app.add_option("--bind", bind, "Listen address")->capture_default_str();
  app.add_option("--lat", config.lat, "Spawn latitude, degrees")->capture_default_str();
  app.add_option("--lon", config.lon, "Spawn longitude, degrees")->capture_default_str();
  app.add_option("--time-scale", config.time_scale, "Simulated seconds per wall second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--deaf", deaf, "Never answer commands");
  app.add_flag("--deny", deny, "Refuse every command");
  CLI11_PARSE(app, argc, argv);

  config.bind_address = bind.c_str();
  config.ack_commands = deaf ? 0 : 1;
  config.deny_commands = deny ? 1 : 0;

  const sigset_t signals = block_stop_signals();
  webgcs_sim* sim = nullptr;
  if (webgcs_sim_create(&config, &sim) != WEBGCS_OK || webgcs_sim_start(sim) != WEBGCS_OK) {
    std::fprintf(stderr, "simvehicle: %s\n", webgcs_last_error());
    webgcs_sim_destroy(sim);
    return 1;
  }
  std::printf("simvehicle listening on %s:%u (spawn %.7f, %.7f, x%.2f)\n", bind.c_str(), webgcs_sim_port(sim),
              config.lat, config.lon, config.time_scale);
  std::fflush(stdout);

  wait_stop_signal(signals);
  webgcs_sim_destroy(sim);
  return 0;
}
