#include "link/vehicle_link.hpp"

#include <array>

namespace webgcs::link {
namespace {

bool is_droppable(const mav::Message& msg) {
  return !std::holds_alternative<mav::CommandAck>(msg) && !std::holds_alternative<mav::StatusText>(msg);
}

bool is_vehicle_heartbeat(const mav::Heartbeat& hb) {
  return hb.autopilot != mav::enums::kAutopilotInvalid && hb.type != mav::enums::kTypeGcs;
}

}  // namespace

VehicleLink::VehicleLink(LinkConfig config, const Clock& clock, TransportFactory factory)
    : config_(std::move(config)),
      clock_(clock),
      factory_(std::move(factory)),
      monitor_(config_.heartbeat_timeout),
      queue_(config_.queue_capacity) {
  if (config_.backoff.empty()) config_.backoff.push_back(std::chrono::seconds(1));
}

VehicleLink::~VehicleLink() { disconnect(); }

bool VehicleLink::connect(std::string_view address, std::string& error) {
  auto ep = parse_endpoint(address, error);
  if (!ep) return false;
  return connect(*ep, error);
}

bool VehicleLink::connect(const Endpoint& endpoint, std::string& error) {
  if (worker_.joinable()) {
    error = "link already active; disconnect first";
    return false;
  }
  {
    std::lock_guard lock(state_mutex_);
    endpoint_ = endpoint;
    record(monitor_.start_connecting(clock_.now()));
  }
  {
    std::lock_guard lock(stop_mutex_);
    stop_ = false;
  }
  worker_ = std::thread([this] { run(); });
  return true;
}

void VehicleLink::disconnect() {
  {
    std::lock_guard lock(stop_mutex_);
    stop_ = true;
  }
  stop_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
  close_transport();
  std::lock_guard lock(state_mutex_);
  record(monitor_.disconnect(clock_.now()));
  endpoint_.reset();
}

SendStatus VehicleLink::send(const mav::Message& msg) { return write_message(msg, true); }

std::vector<LinkEvent> VehicleLink::poll_events(size_t max) {
  {
    std::lock_guard lock(state_mutex_);
    record(monitor_.check_timeout(clock_.now()));
  }
  return queue_.pop(max);
}

LinkState VehicleLink::state() const {
  std::lock_guard lock(state_mutex_);
  return monitor_.state();
}

std::optional<Endpoint> VehicleLink::endpoint() const {
  std::lock_guard lock(state_mutex_);
  return endpoint_;
}

LinkStats VehicleLink::stats() const {
  std::lock_guard lock(state_mutex_);
  LinkStats s = stats_;
  s.events_dropped = queue_.dropped();
  return s;
}

void VehicleLink::record(std::optional<LinkTransition> transition) {
  if (transition) queue_.push(std::move(*transition), false);
}

bool VehicleLink::wait_for_stop(Duration d) {
  std::unique_lock lock(stop_mutex_);
  return stop_cv_.wait_for(lock, d, [this] { return stop_; });
}

bool VehicleLink::open_transport() {
  std::optional<Endpoint> ep = endpoint();
  if (!ep) return false;
  auto transport = factory_(*ep);
  std::string error;
  const bool ok = transport && transport->open(error);
  {
    std::lock_guard lock(state_mutex_);
    ++stats_.connect_attempts;
  }
  if (!ok) return false;
  parser_.reset();
  std::lock_guard lock(write_mutex_);
  transport_ = std::move(transport);
  return true;
}

void VehicleLink::close_transport() {
  std::lock_guard lock(write_mutex_);
  if (transport_) transport_->close();
  transport_.reset();
}

void VehicleLink::handle_bytes(std::span<const uint8_t> bytes) {
  auto result = parser_.feed(bytes);
  const TimePoint now = clock_.now();
  std::lock_guard lock(state_mutex_);
  stats_.parser += result.diagnostics;
  for (const auto& frame : result.frames) {
    mav::Message msg;
    try {
      msg = mav::decode_message(frame);
    } catch (const mav::CodecError&) {
      continue;
    }
    if (!monitor_.accepts(frame.sys_id)) continue;
    if (const auto* hb = std::get_if<mav::Heartbeat>(&msg); hb && is_vehicle_heartbeat(*hb)) {
      record(monitor_.on_heartbeat(frame.sys_id, frame.comp_id, now));
    }
    const bool droppable = is_droppable(msg);
    queue_.push(InboundMessage{std::move(msg), frame.sys_id, frame.comp_id, now}, droppable);
  }
}

SendStatus VehicleLink::write_message(const mav::Message& msg, bool require_connected) {
  std::lock_guard wlock(write_mutex_);
  if (require_connected) {
    std::lock_guard lock(state_mutex_);
    if (monitor_.state().phase != LinkPhase::Connected) return SendStatus::NotConnected;
  }
  if (!transport_ || !transport_->is_open() || broken_) return SendStatus::NotConnected;

  std::vector<uint8_t> bytes;
  try {
    bytes = mav::encode_frame(msg, {seq_, config_.sys_id, config_.comp_id}, config_.out_version);
  } catch (const mav::CodecError&) {
    return SendStatus::EncodeFailed;
  }
  ++seq_;
  if (!transport_->write(bytes)) {
    // Only the reader thread closes the transport; it picks up broken_.
    std::lock_guard lock(state_mutex_);
    record(monitor_.on_write_error(clock_.now()));
    broken_ = true;
    return SendStatus::WriteFailed;
  }
  std::lock_guard lock(state_mutex_);
  ++stats_.frames_sent;
  stats_.bytes_sent += bytes.size();
  return SendStatus::Sent;
}

void VehicleLink::run() {
  size_t failures = 0;
  std::optional<TimePoint> next_heartbeat;
  TimePoint last_rx = clock_.now();
  std::array<uint8_t, 2048> buf{};

  while (true) {
    {
      std::lock_guard lock(stop_mutex_);
      if (stop_) break;
    }

    Transport* transport = nullptr;
    {
      std::lock_guard lock(write_mutex_);
      if (broken_ && transport_) {
        transport_->close();
        transport_.reset();
      }
      broken_ = false;
      transport = transport_.get();
    }

    if (transport == nullptr) {
      if (failures > 0) {
        const Duration delay = config_.backoff[std::min(failures - 1, config_.backoff.size() - 1)];
        if (wait_for_stop(delay)) break;
      }
      if (open_transport()) {
        failures = 0;
        last_rx = clock_.now();
        next_heartbeat.reset();
      } else {
        ++failures;
      }
      continue;
    }

    ReadResult r = transport->read(buf, config_.read_timeout);
    const TimePoint now = clock_.now();
    if (r.status == ReadResult::Status::Data) {
      last_rx = now;
      handle_bytes(std::span(buf.data(), r.bytes));
    } else if (r.status == ReadResult::Status::Closed) {
      close_transport();
      ++failures;
      continue;
    }

    bool lost_and_silent = false;
    {
      std::lock_guard lock(state_mutex_);
      record(monitor_.check_timeout(now));
      lost_and_silent = monitor_.state().phase == LinkPhase::Lost && now - last_rx > config_.heartbeat_timeout;
    }
    if (lost_and_silent) {
      // Peer is gone without closing the stream; start over on a fresh one.
      close_transport();
      ++failures;
      continue;
    }

    if (config_.gcs_heartbeat_period > Duration::zero() && (!next_heartbeat || now >= *next_heartbeat)) {
      mav::Heartbeat hb;
      hb.type = mav::enums::kTypeGcs;
      hb.autopilot = mav::enums::kAutopilotInvalid;
      hb.system_status = mav::enums::kStateActive;
      hb.mavlink_version = 3;
      write_message(hb, false);
      next_heartbeat = now + config_.gcs_heartbeat_period;
    }
  }
}

}  // namespace webgcs::link
