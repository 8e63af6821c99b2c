#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "link/endpoint.hpp"
#include "link/event_queue.hpp"
#include "link/link_monitor.hpp"
#include "link/transport.hpp"
#include "mav/codec.hpp"
#include "util/clock.hpp"

namespace webgcs::link {

struct LinkConfig {
  Duration heartbeat_timeout = std::chrono::seconds(5);
  // Delay before each reconnect attempt; the last entry repeats.
  std::vector<Duration> backoff = {std::chrono::seconds(1), std::chrono::seconds(2), std::chrono::seconds(4),
                                   std::chrono::seconds(5)};
  uint8_t sys_id = 255;
  uint8_t comp_id = 190;
  mav::Version out_version = mav::Version::V2;
  Duration gcs_heartbeat_period = std::chrono::seconds(1);  // zero disables
  size_t queue_capacity = 1024;
  std::chrono::milliseconds read_timeout{20};
};

struct InboundMessage {
  mav::Message message;
  uint8_t sys_id = 0;
  uint8_t comp_id = 0;
  TimePoint received_at{};
};

using LinkEvent = std::variant<InboundMessage, LinkTransition>;

enum class SendStatus { Sent, NotConnected, WriteFailed, EncodeFailed };

struct LinkStats {
  uint64_t connect_attempts = 0;
  uint64_t frames_sent = 0;
  uint64_t bytes_sent = 0;
  mav::ParserStats parser;
  size_t events_dropped = 0;
};

// Owns the transport to one vehicle. A reader thread decodes inbound frames,
// tracks heartbeats, emits the GCS heartbeat and reconnects with backoff.
class VehicleLink {
 public:
  explicit VehicleLink(LinkConfig config = {}, const Clock& clock = SystemClock::instance(),
                       TransportFactory factory = make_transport);
  ~VehicleLink();

  VehicleLink(const VehicleLink&) = delete;
  VehicleLink& operator=(const VehicleLink&) = delete;

  bool connect(const Endpoint& endpoint, std::string& error);
  bool connect(std::string_view address, std::string& error);
  void disconnect();

  // Requires phase Connected. The link assigns the sequence number.
  SendStatus send(const mav::Message& msg);

  // Also evaluates the heartbeat timeout, so LOST is reported with no traffic.
  std::vector<LinkEvent> poll_events(size_t max = SIZE_MAX);

  LinkState state() const;
  std::optional<Endpoint> endpoint() const;
  LinkStats stats() const;
  const LinkConfig& config() const noexcept { return config_; }

 private:
  void run();
  bool open_transport();
  void handle_bytes(std::span<const uint8_t> bytes);
  SendStatus write_message(const mav::Message& msg, bool require_connected);
  void close_transport();
  void record(std::optional<LinkTransition> transition);
  bool wait_for_stop(Duration d);

  LinkConfig config_;
  const Clock& clock_;
  TransportFactory factory_;

  mutable std::mutex state_mutex_;  // monitor_, endpoint_, stats_
  LinkMonitor monitor_;
  std::optional<Endpoint> endpoint_;
  LinkStats stats_;

  std::mutex write_mutex_;  // transport_, seq_
  std::unique_ptr<Transport> transport_;
  uint8_t seq_ = 0;
  bool broken_ = false;

  EventQueue<LinkEvent> queue_;
  mav::FrameParser parser_;

  std::mutex stop_mutex_;
  std::condition_variable stop_cv_;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace webgcs::link
