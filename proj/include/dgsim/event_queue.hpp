#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "dgsim/time.hpp"

namespace dgsim {

using EventId = std::uint64_t;

// Deterministic single-threaded event loop. Events at equal time are
// delivered in insertion order (seq tie-break); the clock never moves
// backward.
class EventQueue {
 public:
  using Action = std::function<void()>;

  Tick now() const { return now_; }

  EventId schedule(Tick time, std::uint32_t target, std::uint32_t kind, Action action) {
    if (time < now_)
      throw std::logic_error("event scheduled in the past: t=" + std::to_string(time) +
                             " now=" + std::to_string(now_));
    EventId id = next_seq_++;
    std::uint32_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
    } else {
      slot = static_cast<std::uint32_t>(pool_.size());
      pool_.emplace_back();
    }
    pool_[slot] = Slot{target, kind, std::move(action)};
    heap_.push(HeapEntry{time, id, slot});
    return id;
  }

  EventId schedule_in(Tick delay, std::uint32_t target, std::uint32_t kind, Action action) {
    return schedule(now_ + delay, target, kind, std::move(action));
  }

  void cancel(EventId id) { cancelled_.insert(id); }

  bool empty() const { return heap_.empty(); }

  // Processes every event with time <= limit; the clock finishes at limit
  // even when the queue drains early.
  Tick run_until(Tick limit) {
    drain(limit);
    if (limit > now_) now_ = limit;
    return now_;
  }

  // Runs to exhaustion; the clock finishes at the last event's time.
  Tick run_all() {
    drain(UINT64_MAX);
    return now_;
  }

  void set_log(std::string* sink) { log_ = sink; }

  std::uint64_t events_processed() const { return processed_; }

 private:
  struct Slot {
    std::uint32_t target = 0;
    std::uint32_t kind = 0;
    Action action;
  };

  struct HeapEntry {
    Tick time;
    EventId seq;
    std::uint32_t slot;
    bool operator>(const HeapEntry& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  void drain(Tick limit) {
    while (!heap_.empty()) {
      HeapEntry top = heap_.top();
      if (top.time > limit) break;
      heap_.pop();
      Slot& slot = pool_[top.slot];
      Action action = std::move(slot.action);
      std::uint32_t target = slot.target, kind = slot.kind;
      slot.action = nullptr;
      free_slots_.push_back(top.slot);
      if (!cancelled_.empty() && cancelled_.erase(top.seq)) continue;
      now_ = top.time;
      if (log_) {
        log_->append(std::to_string(top.time));
        log_->push_back(',');
        log_->append(std::to_string(top.seq));
        log_->push_back(',');
        log_->append(std::to_string(target));
        log_->push_back(',');
        log_->append(std::to_string(kind));
        log_->push_back('\n');
      }
      ++processed_;
      action();
    }
  }

  Tick now_ = 0;
  EventId next_seq_ = 0;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap_;
  std::vector<Slot> pool_;
  std::vector<std::uint32_t> free_slots_;
  std::unordered_set<EventId> cancelled_;
  std::string* log_ = nullptr;
  std::uint64_t processed_ = 0;
};

}  // namespace dgsim
