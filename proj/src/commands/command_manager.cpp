#include "commands/command_manager.hpp"

#include <algorithm>

#include "telemetry/flight_mode.hpp"

namespace webgcs::commands {
namespace {

bool in_guided(const telemetry::TelemetrySnapshot& s) {
  return s.mode.value && s.mode.value->custom_mode == telemetry::copter::kGuided;
}

}  // namespace

CommandManager::CommandManager(Sender sender, RetryPolicy policy) : sender_(std::move(sender)), policy_(policy) {}

CommandOutcome CommandManager::resolve(const Pending& p, OutcomeStatus status, TimePoint now, std::string reason,
                                       int code) {
  CommandOutcome o;
  o.id = p.cmd.id;
  o.kind = p.cmd.kind;
  o.status = status;
  o.result_code = code;
  o.reason = std::move(reason);
  o.resolved_at = now;
  o.implicit_for = p.implicit_for;
  return o;
}

SubmitResult CommandManager::submit(FlightCommand cmd, const telemetry::TelemetrySnapshot& snapshot,
                                    const safety::FenceConfig& fence, Target target, TimePoint now) {
  std::lock_guard lock(mutex_);
  if (cmd.id == 0) {
    cmd.id = next_id();
  } else {
    last_id_ = std::max(last_id_, cmd.id);
  }
  cmd.issued_at = now;

  SubmitResult result{cmd.id, {}};
  Pending p;
  p.cmd = cmd;
  p.target = target;
  auto fail = [&](OutcomeStatus status, std::string reason) {
    result.outcomes.push_back(resolve(p, status, now, std::move(reason)));
    return result;
  };

  if (auto problem = cmd.validate()) return fail(OutcomeStatus::PreconditionFailed, "invalid command: " + *problem);
  if (snapshot.link != link::LinkPhase::Connected) return fail(OutcomeStatus::PreconditionFailed, "link down");

  if (auto verdict = safety::vet(fence, cmd); !verdict.allowed) {
    return fail(OutcomeStatus::FenceDenied, verdict.reason);
  }

  const bool armed = snapshot.is_armed();
  const double rel_alt = snapshot.rel_alt.value.value_or(0.0);
  const double groundspeed = snapshot.groundspeed.value.value_or(0.0);
  bool needs_guided = false;
  switch (cmd.kind) {
    case CommandKind::Takeoff:
      if (!armed) return fail(OutcomeStatus::PreconditionFailed, "not armed");
      needs_guided = !in_guided(snapshot);
      break;
    case CommandKind::Goto:
      if (!armed) return fail(OutcomeStatus::PreconditionFailed, "not armed");
      if (rel_alt <= kAirborneAltM) return fail(OutcomeStatus::PreconditionFailed, "not airborne");
      needs_guided = !in_guided(snapshot);
      break;
    case CommandKind::Disarm:
      if (!cmd.force && !(rel_alt < kLandedAltM && groundspeed < kLandedSpeedMps)) {
        return fail(OutcomeStatus::PreconditionFailed, "not landed");
      }
      break;
    default:
      break;
  }

  try {
    p.wire = translate(cmd, target);
  } catch (const TranslateError& e) {
    return fail(OutcomeStatus::PreconditionFailed, e.what());
  }

  if (!needs_guided) {
    dispatch(std::move(p), now, result.outcomes);
    return result;
  }

  Pending mode_change;
  mode_change.cmd = FlightCommand::set_mode("GUIDED");
  mode_change.cmd.id = next_id();
  mode_change.cmd.issued_at = now;
  mode_change.implicit_for = cmd.id;
  mode_change.target = target;
  mode_change.wire = translate(mode_change.cmd, target);
  p.waiting_on = mode_change.cmd.id;
  pending_.push_back(std::move(p));
  dispatch(std::move(mode_change), now, result.outcomes);
  return result;
}

void CommandManager::dispatch(Pending p, TimePoint now, std::vector<CommandOutcome>& out) {
  if (const auto* c = std::get_if<mav::CommandLong>(&p.wire)) p.wire_command = c->command;
  if (!sender_(p.wire)) {
    auto outcome = resolve(p, OutcomeStatus::PreconditionFailed, now, "send failed: link down");
    out.push_back(outcome);
    release_waiting(outcome, now, out);
    return;
  }
  if (p.cmd.kind == CommandKind::Goto) {
    // Position targets have no ACK; delivery is the outcome.
    out.push_back(resolve(p, OutcomeStatus::Accepted, now));
    return;
  }
  p.attempts = 1;
  p.first_sent = now;
  pending_.push_back(std::move(p));
}

void CommandManager::release_waiting(const CommandOutcome& implicit, TimePoint now, std::vector<CommandOutcome>& out) {
  std::vector<Pending> parents;
  auto it = std::stable_partition(pending_.begin(), pending_.end(),
                                  [&](const Pending& p) { return p.waiting_on != implicit.id; });
  std::move(it, pending_.end(), std::back_inserter(parents));
  pending_.erase(it, pending_.end());

  for (auto& parent : parents) {
    parent.waiting_on.reset();
    if (implicit.status == OutcomeStatus::Accepted) {
      dispatch(std::move(parent), now, out);
    } else {
      out.push_back(resolve(parent, OutcomeStatus::PreconditionFailed, now,
                            std::string("mode change to GUIDED failed: ") + to_string(implicit.status)));
    }
  }
}

std::vector<CommandOutcome> CommandManager::process_ack(const mav::CommandAck& ack, TimePoint now) {
  std::lock_guard lock(mutex_);
  std::vector<CommandOutcome> out;
  auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Pending& p) {
    return !p.waiting_on && p.attempts > 0 && p.wire_command == ack.command;
  });
  if (it == pending_.end()) {
    ++unmatched_acks_;
    return out;
  }
  Pending p = std::move(*it);
  pending_.erase(it);
  CommandOutcome outcome =
      ack.result == mav::enums::kResultAccepted
          ? resolve(p, OutcomeStatus::Accepted, now)
          : resolve(p, OutcomeStatus::Rejected, now, "vehicle result " + std::to_string(ack.result), ack.result);
  out.push_back(outcome);
  release_waiting(outcome, now, out);
  return out;
}

std::vector<CommandOutcome> CommandManager::tick(TimePoint now) {
  std::lock_guard lock(mutex_);
  std::vector<CommandOutcome> out;
  std::vector<Pending> expired;
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->waiting_on || it->attempts == 0) {
      ++it;
      continue;
    }
    if (now - it->first_sent >= policy_.timeout) {
      expired.push_back(std::move(*it));
      it = pending_.erase(it);
      continue;
    }
    if (it->attempts < policy_.max_attempts && now >= it->first_sent + it->attempts * policy_.interval) {
      sender_(it->wire);
      ++it->attempts;
    }
    ++it;
  }
  for (const auto& p : expired) {
    auto outcome = resolve(p, OutcomeStatus::Timeout, now,
                           "no COMMAND_ACK after " + std::to_string(p.attempts) + " attempts");
    out.push_back(outcome);
    release_waiting(outcome, now, out);
  }
  return out;
}

size_t CommandManager::pending() const {
  std::lock_guard lock(mutex_);
  return pending_.size();
}

uint64_t CommandManager::unmatched_acks() const {
  std::lock_guard lock(mutex_);
  return unmatched_acks_;
}

}  // namespace webgcs::commands
