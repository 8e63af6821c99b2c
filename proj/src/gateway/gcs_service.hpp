#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "commands/command_manager.hpp"
#include "gateway/json_codec.hpp"
#include "link/vehicle_link.hpp"
#include "safety/geofence.hpp"
#include "telemetry/telemetry_store.hpp"
#include "util/clock.hpp"

namespace webgcs::gateway {

struct ServiceConfig {
  link::LinkConfig link;
  commands::RetryPolicy retry;
  safety::FenceConfig fence;  // without a home the fence follows the vehicle's home
  double takeoff_default_m = 15.24;
  Duration stale_after = telemetry::kDefaultStaleAfter;
  double push_rate_hz = 4.0;
  // Telemetry is re-sent at least this often even without new data, so
  // staleness flags reach clients.
  Duration idle_push_period = std::chrono::seconds(1);
  // Messages sampled together arrive as separate frames; wait this long after
  // the first one so the whole batch goes out in one push.
  Duration coalesce_window = std::chrono::milliseconds(15);
  Duration pump_period = std::chrono::milliseconds(5);
};

struct ServiceEvent {
  std::string type;  // telemetry, command_result, link_state, status_text, fence_event
  Json payload;
  int64_t ts = 0;  // unix ms
};

using EventSink = std::function<void(const ServiceEvent&)>;

enum class ConnectStatus { Accepted, BadAddress, ArmedNeedsForce, Failed };

struct ConnectResult {
  ConnectStatus status = ConnectStatus::Failed;
  std::string message;
};

enum class SubmitStatus { Submitted, LinkDown };

struct Submission {
  SubmitStatus status = SubmitStatus::LinkDown;
  commands::CommandId token = 0;
  std::vector<commands::CommandOutcome> immediate;
};

// Owns the vehicle link and everything derived from it. A pump thread moves
// link events into telemetry, command tracking and fence monitoring and fans
// the results out to subscribers.
class GcsService {
 public:
  explicit GcsService(ServiceConfig config = {}, const Clock& clock = SystemClock::instance(),
                      link::TransportFactory factory = link::make_transport);
  ~GcsService();

  GcsService(const GcsService&) = delete;
  GcsService& operator=(const GcsService&) = delete;

  void start();
  void stop();

  ConnectResult connect(std::string_view address, bool force);
  void disconnect();

  Submission submit(commands::FlightCommand cmd);

  telemetry::TelemetrySnapshot snapshot() const;
  Json telemetry_json() const;
  Json state_json() const;

  // Fence with the vehicle home filled in when none was configured.
  safety::FenceConfig effective_fence() const;
  Json update_fence(const Json& body);

  double takeoff_default_m() const noexcept { return config_.takeoff_default_m; }
  link::LinkState link_state() const { return link_.state(); }
  link::LinkStats link_stats() const { return link_.stats(); }
  std::optional<commands::CommandOutcome> outcome(commands::CommandId token) const;

  uint64_t subscribe(EventSink sink);
  void unsubscribe(uint64_t id);

  // One pump iteration; the pump thread calls this, tests may call it directly.
  void pump_once();

 private:
  void run();
  void emit(std::string type, Json payload);
  void publish_outcomes(const std::vector<commands::CommandOutcome>& outcomes);
  void handle_event(link::LinkEvent& ev, TimePoint now);
  void mark_dirty(TimePoint now);
  void push_telemetry(TimePoint now);
  safety::FenceConfig effective_fence_locked(const telemetry::TelemetrySnapshot& s) const;

  ServiceConfig config_;
  const Clock& clock_;
  link::VehicleLink link_;
  telemetry::TelemetryStore telemetry_;
  commands::CommandManager commands_;
  safety::FenceMonitor fence_monitor_;

  // Serializes pump iterations, submissions and connection swaps.
  mutable std::recursive_mutex pump_mutex_;
  mutable std::mutex fence_mutex_;
  safety::FenceConfig fence_;
  commands::Target target_;

  std::optional<TimePoint> dirty_since_;  // first unsent change
  std::optional<TimePoint> last_push_;
  TimePoint push_tat_{};  // token bucket: theoretical time of the next push

  mutable std::mutex outcomes_mutex_;
  std::map<commands::CommandId, commands::CommandOutcome> outcomes_;

  std::mutex sinks_mutex_;  // also orders emitted events
  std::map<uint64_t, EventSink> sinks_;
  uint64_t next_sink_ = 1;

  std::atomic<bool> stop_{false};
  std::mutex wake_mutex_;
  std::condition_variable wake_cv_;
  std::thread thread_;
};

}  // namespace webgcs::gateway
