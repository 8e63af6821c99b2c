#include "link/link_monitor.hpp"

namespace webgcs::link {

const char* to_string(LinkPhase phase) noexcept {
  switch (phase) {
    case LinkPhase::Disconnected: return "disconnected";
    case LinkPhase::Connecting: return "connecting";
    case LinkPhase::Connected: return "connected";
    case LinkPhase::Lost: return "lost";
  }
  return "unknown";
}

std::optional<LinkTransition> LinkMonitor::move_to(LinkPhase next, TimePoint now, std::string reason) {
  if (state_.phase == next) return std::nullopt;
  LinkTransition t{state_.phase, next, now, std::move(reason)};
  state_.phase = next;
  return t;
}

std::optional<LinkTransition> LinkMonitor::start_connecting(TimePoint now) {
  if (state_.phase != LinkPhase::Disconnected) return std::nullopt;
  return move_to(LinkPhase::Connecting, now, "connect requested");
}

std::optional<LinkTransition> LinkMonitor::on_heartbeat(uint8_t sys_id, uint8_t comp_id, TimePoint now) {
  if (state_.phase == LinkPhase::Disconnected || !accepts(sys_id)) return std::nullopt;
  if (!locked_) {
    locked_ = true;
    state_.remote_sys_id = sys_id;
    state_.remote_comp_id = comp_id;
  }
  state_.last_heartbeat_at = now;
  return move_to(LinkPhase::Connected, now,
                 state_.phase == LinkPhase::Lost ? "heartbeat reacquired" : "first heartbeat");
}

std::optional<LinkTransition> LinkMonitor::on_write_error(TimePoint now) {
  if (state_.phase != LinkPhase::Connected) return std::nullopt;
  return move_to(LinkPhase::Lost, now, "transport write failed");
}

std::optional<LinkTransition> LinkMonitor::check_timeout(TimePoint now) {
  if (state_.phase != LinkPhase::Connected || !state_.last_heartbeat_at) return std::nullopt;
  if (now - *state_.last_heartbeat_at <= timeout_) return std::nullopt;
  return move_to(LinkPhase::Lost, now, "heartbeat timeout");
}

std::optional<LinkTransition> LinkMonitor::disconnect(TimePoint now) {
  auto t = move_to(LinkPhase::Disconnected, now, "disconnect requested");
  state_ = LinkState{};
  locked_ = false;
  return t;
}

}  // namespace webgcs::link
