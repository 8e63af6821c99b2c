#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "commands/flight_command.hpp"
#include "link/link_monitor.hpp"
#include "safety/geofence.hpp"
#include "telemetry/telemetry_store.hpp"

namespace webgcs::commands {

struct RetryPolicy {
  Duration interval = std::chrono::seconds(1);
  int max_attempts = 3;
  Duration timeout = std::chrono::seconds(3);
};

// Vehicle-state thresholds for preconditions.
inline constexpr double kAirborneAltM = 1.0;
inline constexpr double kLandedAltM = 1.0;
inline constexpr double kLandedSpeedMps = 1.0;

struct SubmitResult {
  CommandId id = 0;
  // Outcomes resolved during submit (the command's own and/or an implicit
  // mode change). Empty when the command is waiting for an ACK.
  std::vector<CommandOutcome> outcomes;
};

// Tracks every command from submission to exactly one terminal outcome.
class CommandManager {
 public:
  // Writes one message to the vehicle; false when nothing was written.
  using Sender = std::function<bool(const mav::Message&)>;

  explicit CommandManager(Sender sender, RetryPolicy policy = {});

  SubmitResult submit(FlightCommand cmd, const telemetry::TelemetrySnapshot& snapshot,
                      const safety::FenceConfig& fence, Target target, TimePoint now);

  std::vector<CommandOutcome> process_ack(const mav::CommandAck& ack, TimePoint now);

  // Resends unacknowledged commands and times them out.
  std::vector<CommandOutcome> tick(TimePoint now);

  size_t pending() const;
  uint64_t unmatched_acks() const;

 private:
  struct Pending {
    FlightCommand cmd;
    mav::Message wire;
    uint16_t wire_command = 0;
    int attempts = 0;
    TimePoint first_sent{};
    std::optional<CommandId> implicit_for;
    std::optional<CommandId> waiting_on;  // parent held until its mode change resolves
    Target target;
  };

  CommandId next_id() { return ++last_id_; }
  CommandOutcome resolve(const Pending& p, OutcomeStatus status, TimePoint now, std::string reason = {}, int code = 0);
  // Sends a command; appends immediate outcomes (GOTO accepted, send failure).
  void dispatch(Pending p, TimePoint now, std::vector<CommandOutcome>& out);
  // Parent commands waiting on `implicit` continue or fail.
  void release_waiting(const CommandOutcome& implicit, TimePoint now, std::vector<CommandOutcome>& out);

  mutable std::mutex mutex_;
  Sender sender_;
  RetryPolicy policy_;
  std::vector<Pending> pending_;  // in submission order
  CommandId last_id_ = 0;
  uint64_t unmatched_acks_ = 0;
};

}  // namespace webgcs::commands
