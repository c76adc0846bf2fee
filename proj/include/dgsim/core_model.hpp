#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dgsim/event_queue.hpp"
#include "dgsim/time.hpp"
#include "dgsim/workload.hpp"

namespace dgsim {

class ComputeEngine;

struct AccessRequest {
  std::uint32_t core_id = 0;
  std::uint64_t trace_index = 0;
  std::uint64_t address = 0;
  Op op = Op::Read;
  Tick issue_time = 0;
  Tick completion_time = 0;
  bool completed = false;
  bool went_remote = false;
  // this request put its own packet on the wire (vs riding an existing
  // inflight migration)
  bool initiated_packet = false;
};

// Bookkeeping for dirty lines living in the LLC: a FIFO of dirty line
// addresses with a capacity model whose overflow emits the eviction stream,
// plus the latest value per written line (applied in trace order at issue).
class LlcDirtySet {
 public:
  explicit LlcDirtySet(std::size_t capacity) : capacity_(capacity) {}

  void update_value(std::uint64_t address, const std::array<std::uint8_t, kLineBytes>& value,
                    std::uint64_t writer_index) {
    std::uint64_t key = address & ~std::uint64_t(kLineBytes - 1);
    auto it = values_.find(key);
    if (it == values_.end()) {
      values_.emplace(key, Value{value, writer_index});
    } else if (it->second.writer_index <= writer_index) {
      it->second = Value{value, writer_index};
    }
  }

  struct Evicted {
    std::uint64_t address;
    std::array<std::uint8_t, kLineBytes> value;
  };

  // Marks the line dirty-in-LLC after a write completes; overflowing the
  // capacity evicts the oldest dirty line.
  std::optional<Evicted> complete_write(std::uint64_t address) {
    std::uint64_t key = address & ~std::uint64_t(kLineBytes - 1);
    if (in_fifo_.count(key)) return std::nullopt;
    fifo_.push_back(key);
    in_fifo_.insert(key);
    if (fifo_.size() <= capacity_) return std::nullopt;
    std::uint64_t victim = fifo_.front();
    fifo_.pop_front();
    in_fifo_.erase(victim);
    return Evicted{victim, values_.at(victim).bytes};
  }

  const std::array<std::uint8_t, kLineBytes>& value_of(std::uint64_t address) const {
    return values_.at(address & ~std::uint64_t(kLineBytes - 1)).bytes;
  }

  // Lines still dirty in the LLC at end of run, for image reconstruction.
  std::vector<Evicted> dirty_lines() const {
    std::vector<Evicted> out;
    out.reserve(fifo_.size());
    for (std::uint64_t a : fifo_) out.push_back({a, values_.at(a).bytes});
    return out;
  }

  std::size_t size() const { return fifo_.size(); }

 private:
  struct Value {
    std::array<std::uint8_t, kLineBytes> bytes;
    std::uint64_t writer_index;
  };
  std::size_t capacity_;
  std::deque<std::uint64_t> fifo_;
  std::unordered_set<std::uint64_t> in_fifo_;
  std::unordered_map<std::uint64_t, Value> values_;
};

// Abstract OoO front end: consumes a trace, overlaps compute gaps with up
// to `window_limit` outstanding misses, retires in order (a full window
// blocks until the oldest outstanding completes).
class Core {
 public:
  Core(EventQueue& eq, std::uint32_t id, std::vector<TraceRecord> trace,
       std::uint32_t window_limit, Tick cycle_ticks, ComputeEngine* engine, LlcDirtySet* llc);

  void start();
  void on_complete(AccessRequest* req);

  bool finished() const { return next_index_ >= trace_.size() && window_.empty(); }

  std::uint64_t instructions() const { return completed_; }
  Tick finish_tick() const { return finish_tick_; }
  std::uint64_t cycles(Tick cycle) const { return (finish_tick_ + cycle - 1) / cycle; }
  double mean_access_latency_ticks() const {
    return completed_ ? static_cast<double>(total_latency_) / completed_ : 0.0;
  }
  std::uint32_t id() const { return id_; }
  Tick window_stall_ticks() const { return stalled_ticks_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  void step();
  void schedule_step(Tick at);

  EventQueue& eq_;
  std::uint32_t id_;
  std::vector<TraceRecord> trace_;
  std::uint32_t window_limit_;
  Tick cycle_ticks_;
  ComputeEngine* engine_;
  LlcDirtySet* llc_;

  std::deque<AccessRequest> window_;  // un-retired requests, oldest first
  std::uint64_t next_index_ = 0;
  bool waiting_for_slot_ = false;
  bool step_scheduled_ = false;
  std::uint64_t completed_ = 0;
  std::uint64_t total_latency_ = 0;
  Tick finish_tick_ = 0;
  Tick stall_started_ = 0;
  Tick stalled_ticks_ = 0;
};

}  // namespace dgsim
