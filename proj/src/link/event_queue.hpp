#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <mutex>
#include <vector>

namespace webgcs::link {

// Bounded FIFO. When full, the oldest droppable item makes room; items that
// are not droppable are never discarded (the queue grows instead).
template <class T>
class EventQueue {
 public:
  explicit EventQueue(size_t capacity) : capacity_(capacity) {}

  void push(T item, bool droppable) {
    std::lock_guard lock(mutex_);
    if (items_.size() >= capacity_) {
      auto victim = std::find_if(items_.begin(), items_.end(), [](const Entry& e) { return e.droppable; });
      if (victim != items_.end()) {
        items_.erase(victim);
        ++dropped_;
      } else if (droppable) {
        ++dropped_;
        return;
      }
    }
    items_.push_back({std::move(item), droppable});
  }

  std::vector<T> pop(size_t max) {
    std::lock_guard lock(mutex_);
    std::vector<T> out;
    const size_t n = std::min(max, items_.size());
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      out.push_back(std::move(items_.front().item));
      items_.pop_front();
    }
    return out;
  }

  size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }
  size_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }
  void clear() {
    std::lock_guard lock(mutex_);
    items_.clear();
  }

 private:
  struct Entry {
    T item;
    bool droppable;
  };
  mutable std::mutex mutex_;
  std::deque<Entry> items_;
  size_t capacity_;
  size_t dropped_ = 0;
};

}  // namespace webgcs::link
