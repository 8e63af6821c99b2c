#pragma once

#include <atomic>
#include <chrono>

namespace webgcs {

using SteadyClock = std::chrono::steady_clock;
using TimePoint = SteadyClock::time_point;
using Duration = SteadyClock::duration;
using Seconds = std::chrono::duration<double>;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override { return SteadyClock::now(); }
  static SystemClock& instance() {
    static SystemClock clock;
    return clock;
  }
};

// Test clock, only moves when told to.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(TimePoint start = TimePoint{} + std::chrono::hours(1)) : now_(start.time_since_epoch().count()) {}
  TimePoint now() const override { return TimePoint(Duration(now_.load())); }
  template <class Rep, class Period>
  void advance(std::chrono::duration<Rep, Period> d) {
    now_ += std::chrono::duration_cast<Duration>(d).count();
  }

 private:
  std::atomic<Duration::rep> now_;
};

inline double seconds_between(TimePoint from, TimePoint to) { return Seconds(to - from).count(); }

// Wall-clock unix milliseconds, used for event timestamps.
inline int64_t unix_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace webgcs
