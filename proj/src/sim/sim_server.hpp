#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mav/codec.hpp"
#include "sim/sim_vehicle.hpp"
#include "util/clock.hpp"

namespace webgcs::sim {

struct SimServerConfig {
  std::string bind_address = "0.0.0.0";
  uint16_t port = 5760;  // 0 picks an ephemeral port
  uint8_t sys_id = 1;
  uint8_t comp_id = 1;
  double max_step_s = 0.05;  // simulated seconds per integration step
};

// A position report as it left the simulator: the boot time it carried and
// the wall time it was written.
struct PositionEmission {
  uint32_t time_boot_ms = 0;
  TimePoint sent_at;
};

struct ReceivedCommand {
  mav::Message message;
  TimePoint received_at;
};

// Serves a SimVehicle over MAVLink/TCP to any number of clients. Vehicle
// state survives stop()/start(), so a restart looks like a link outage.
class SimServer {
 public:
  explicit SimServer(SimParams params = {}, SimServerConfig config = {});
  ~SimServer();

  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  bool start(std::string& error);
  void stop();
  bool running() const noexcept { return running_; }
  uint16_t port() const noexcept { return bound_port_; }

  SimState state() const;
  double sim_time() const;
  size_t client_count() const;
  std::vector<PositionEmission> position_log() const;
  std::vector<ReceivedCommand> received_commands() const;

  // Runs fn with the vehicle under the server lock.
  void with_vehicle(const std::function<void(SimVehicle&)>& fn);

 private:
  struct Client {
    int fd = -1;
    mav::FrameParser parser;
  };

  void run();
  void accept_clients();
  void read_client(Client& c);
  void advance(TimePoint now);
  void broadcast(const mav::Message& msg, TimePoint now);
  void close_all();

  SimServerConfig config_;
  mutable std::mutex mutex_;
  SimVehicle vehicle_;
  std::vector<Client> clients_;
  std::vector<PositionEmission> position_log_;
  std::vector<ReceivedCommand> received_;
  uint8_t seq_ = 0;
  int listen_fd_ = -1;
  uint16_t bound_port_ = 0;
  TimePoint last_wall_;
  std::atomic<bool> running_{false};
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

}  // namespace webgcs::sim
