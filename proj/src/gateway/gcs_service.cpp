#include "gateway/gcs_service.hpp"

#include <algorithm>

namespace webgcs::gateway {
namespace {

constexpr size_t kMaxOutcomes = 512;

}  // namespace

GcsService::GcsService(ServiceConfig config, const Clock& clock, link::TransportFactory factory)
    : config_(std::move(config)),
      clock_(clock),
      link_(config_.link, clock, std::move(factory)),
      telemetry_(config_.stale_after),
      commands_([this](const mav::Message& m) { return link_.send(m) == link::SendStatus::Sent; }, config_.retry),
      fence_(config_.fence) {}

GcsService::~GcsService() {
  stop();
  link_.disconnect();
}

void GcsService::start() {
  if (thread_.joinable()) return;
  stop_ = false;
  thread_ = std::thread([this] { run(); });
}

void GcsService::stop() {
  stop_ = true;
  wake_cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void GcsService::run() {
  while (!stop_) {
    pump_once();
    std::unique_lock lock(wake_mutex_);
    wake_cv_.wait_for(lock, config_.pump_period, [this] { return stop_.load(); });
  }
}

ConnectResult GcsService::connect(std::string_view address, bool force) {
  std::string error;
  auto endpoint = link::parse_endpoint(address, error);
  if (!endpoint) return {ConnectStatus::BadAddress, error};

  std::lock_guard lock(pump_mutex_);
  const auto snap = telemetry_.snapshot();
  if (snap.is_armed() && link_.state().phase != link::LinkPhase::Disconnected && !force) {
    return {ConnectStatus::ArmedNeedsForce, "vehicle is armed; set force to swap the link"};
  }
  link_.disconnect();
  // Deliver the old link's transitions, drop its stale messages.
  for (auto& ev : link_.poll_events()) {
    if (std::holds_alternative<link::LinkTransition>(ev)) handle_event(ev, clock_.now());
  }
  telemetry_.reset();
  fence_monitor_.reset();
  mark_dirty(clock_.now());
  if (!link_.connect(*endpoint, error)) return {ConnectStatus::Failed, error};
  return {ConnectStatus::Accepted, endpoint->to_string()};
}

void GcsService::disconnect() {
  std::lock_guard lock(pump_mutex_);
  link_.disconnect();
  for (auto& ev : link_.poll_events()) {
    if (std::holds_alternative<link::LinkTransition>(ev)) handle_event(ev, clock_.now());
  }
}

Submission GcsService::submit(commands::FlightCommand cmd) {
  std::lock_guard lock(pump_mutex_);
  auto snap = telemetry_.snapshot();
  snap.link = link_.state().phase;
  Submission out;
  if (snap.link != link::LinkPhase::Connected) return out;

  const TimePoint now = clock_.now();
  auto result = commands_.submit(std::move(cmd), snap, effective_fence_locked(snap), target_, now);
  out.status = SubmitStatus::Submitted;
  out.token = result.id;
  out.immediate = result.outcomes;
  publish_outcomes(result.outcomes);
  return out;
}

telemetry::TelemetrySnapshot GcsService::snapshot() const { return telemetry_.snapshot(); }

Json GcsService::telemetry_json() const {
  const TimePoint now = clock_.now();
  auto snap = telemetry_.snapshot();
  return to_json(snap, telemetry::staleness(snap, now, config_.stale_after));
}

Json GcsService::state_json() const {
  const TimePoint now = clock_.now();
  auto snap = telemetry_.snapshot();
  Json j;
  j["telemetry"] = to_json(snap, telemetry::staleness(snap, now, config_.stale_after));
  j["link"] = link_json(link_.state(), link_.endpoint());
  j["fence"] = to_json(effective_fence_locked(snap));
  j["takeoff_default_m"] = config_.takeoff_default_m;
  return j;
}

safety::FenceConfig GcsService::effective_fence_locked(const telemetry::TelemetrySnapshot& s) const {
  std::lock_guard lock(fence_mutex_);
  safety::FenceConfig f = fence_;
  if (!f.home && s.home) f.home = s.home->position;
  return f;
}

safety::FenceConfig GcsService::effective_fence() const { return effective_fence_locked(telemetry_.snapshot()); }

Json GcsService::update_fence(const Json& body) {
  Json errors;
  {
    std::lock_guard lock(fence_mutex_);
    errors = apply_fence_update(body, fence_);
  }
  return errors;
}

std::optional<commands::CommandOutcome> GcsService::outcome(commands::CommandId token) const {
  std::lock_guard lock(outcomes_mutex_);
  auto it = outcomes_.find(token);
  if (it == outcomes_.end()) return std::nullopt;
  return it->second;
}

uint64_t GcsService::subscribe(EventSink sink) {
  std::lock_guard lock(sinks_mutex_);
  const uint64_t id = next_sink_++;
  sinks_.emplace(id, std::move(sink));
  return id;
}

void GcsService::unsubscribe(uint64_t id) {
  std::lock_guard lock(sinks_mutex_);
  sinks_.erase(id);
}

void GcsService::emit(std::string type, Json payload) {
  ServiceEvent ev{std::move(type), std::move(payload), unix_millis()};
  std::lock_guard lock(sinks_mutex_);
  for (auto& [id, sink] : sinks_) sink(ev);
}

void GcsService::publish_outcomes(const std::vector<commands::CommandOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    {
      std::lock_guard lock(outcomes_mutex_);
      outcomes_[o.id] = o;
      while (outcomes_.size() > kMaxOutcomes) outcomes_.erase(outcomes_.begin());
    }
    emit("command_result", to_json(o));
  }
}

void GcsService::handle_event(link::LinkEvent& ev, TimePoint now) {
  if (auto* t = std::get_if<link::LinkTransition>(&ev)) {
    telemetry_.set_link_phase(t->to);
    if (t->to == link::LinkPhase::Connected) {
      const auto st = link_.state();
      target_.sys_id = st.remote_sys_id;
    }
    mark_dirty(now);
    emit("link_state", to_json(*t));
    return;
  }
  auto& in = std::get<link::InboundMessage>(ev);
  if (const auto* ack = std::get_if<mav::CommandAck>(&in.message)) {
    publish_outcomes(commands_.process_ack(*ack, now));
    return;
  }
  if (const auto* st = std::get_if<mav::StatusText>(&in.message)) {
    emit("status_text", Json{{"severity", st->severity}, {"text", st->text_string()}});
    return;
  }
  telemetry_.apply(in.message, in.received_at);
  mark_dirty(now);
}

void GcsService::mark_dirty(TimePoint now) {
  if (!dirty_since_) dirty_since_ = now;
}

void GcsService::push_telemetry(TimePoint now) {
  const auto period = std::chrono::duration_cast<Duration>(Seconds(1.0 / config_.push_rate_hz));
  const bool settled = dirty_since_ && now - *dirty_since_ >= config_.coalesce_window;
  // Token bucket of two pushes refilled at push_rate_hz. The spare token lets
  // the push phase catch up with a source running at exactly the push rate;
  // with a bucket of one, scheduling delay either drifts or locks a full
  // period behind the data.
  const bool due = !last_push_ || (settled && now >= push_tat_ - period) ||
                   now - *last_push_ >= config_.idle_push_period;
  if (!due) return;
  push_tat_ = std::max(push_tat_, now) + period;
  last_push_ = now;
  dirty_since_.reset();
  emit("telemetry", telemetry_json());
}

void GcsService::pump_once() {
  std::lock_guard lock(pump_mutex_);
  const TimePoint now = clock_.now();
  for (auto& ev : link_.poll_events()) handle_event(ev, now);

  publish_outcomes(commands_.tick(now));

  auto snap = telemetry_.snapshot();
  if (auto breach = fence_monitor_.update(effective_fence_locked(snap), snap, now)) {
    Json payload = to_json(*breach);
    payload["rtl_token"] = nullptr;
    std::vector<commands::CommandOutcome> rtl_outcomes;
    if (breach->request_rtl) {
      snap.link = link_.state().phase;
      auto result = commands_.submit(commands::FlightCommand::rtl(), snap, effective_fence_locked(snap), target_, now);
      payload["rtl_token"] = result.id;
      rtl_outcomes = std::move(result.outcomes);
    }
    emit("fence_event", std::move(payload));
    publish_outcomes(rtl_outcomes);
  }

  push_telemetry(now);
}

}  // namespace webgcs::gateway
