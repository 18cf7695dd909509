#pragma once

#include <cstddef>
#include <deque>
#include <mutex>
#include <vector>

namespace neurorad::demo {

/// FIFO with a fixed capacity. When full, the oldest item is discarded and
/// counted.
template <class T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity ? capacity : 1) {}

  /// Returns false when an older item had to be dropped to make room.
  bool push(T item) {
    std::lock_guard lock(mu_);
    bool kept_all = true;
    if (items_.size() >= capacity_) {
      items_.pop_front();
      ++dropped_;
      kept_all = false;
    }
    items_.push_back(std::move(item));
    return kept_all;
  }

  std::vector<T> drain() {
    std::lock_guard lock(mu_);
    std::vector<T> out(std::make_move_iterator(items_.begin()),
                       std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  std::size_t dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
  }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::deque<T> items_;
  std::size_t dropped_ = 0;
};

}  // namespace neurorad::demo
