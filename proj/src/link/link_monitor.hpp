#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "util/clock.hpp"

namespace webgcs::link {

enum class LinkPhase { Disconnected, Connecting, Connected, Lost };

const char* to_string(LinkPhase phase) noexcept;

struct LinkState {
  LinkPhase phase = LinkPhase::Disconnected;
  std::optional<TimePoint> last_heartbeat_at;
  uint8_t remote_sys_id = 0;
  uint8_t remote_comp_id = 0;
};

struct LinkTransition {
  LinkPhase from = LinkPhase::Disconnected;
  LinkPhase to = LinkPhase::Disconnected;
  TimePoint at{};
  std::string reason;
};

// Heartbeat-driven phase machine. Every method returns the transition it
// caused, if any; no transition is ever reported twice.
class LinkMonitor {
 public:
  explicit LinkMonitor(Duration heartbeat_timeout = std::chrono::seconds(5)) : timeout_(heartbeat_timeout) {}

  std::optional<LinkTransition> start_connecting(TimePoint now);
  std::optional<LinkTransition> on_heartbeat(uint8_t sys_id, uint8_t comp_id, TimePoint now);
  std::optional<LinkTransition> on_write_error(TimePoint now);
  std::optional<LinkTransition> check_timeout(TimePoint now);
  std::optional<LinkTransition> disconnect(TimePoint now);

  // True when a heartbeat from this system would be accepted as the vehicle.
  bool accepts(uint8_t sys_id) const noexcept { return !locked_ || sys_id == state_.remote_sys_id; }

  const LinkState& state() const noexcept { return state_; }
  Duration heartbeat_timeout() const noexcept { return timeout_; }

 private:
  std::optional<LinkTransition> move_to(LinkPhase next, TimePoint now, std::string reason);

  Duration timeout_;
  LinkState state_;
  bool locked_ = false;
};

}  // namespace webgcs::link
