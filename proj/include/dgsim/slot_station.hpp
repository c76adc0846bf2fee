#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>

#include "dgsim/event_queue.hpp"
#include "dgsim/time.hpp"

namespace dgsim {

enum class SlotPolicy : std::uint8_t { Strict, WorkConserving, Fifo };

inline SlotPolicy slot_policy_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "strict") return SlotPolicy::Strict;
  if (t == "work-conserving" || t == "work_conserving") return SlotPolicy::WorkConserving;
  if (t == "fifo") return SlotPolicy::Fifo;
  throw std::invalid_argument("unknown controller policy: " + s);
}

inline const char* to_string(SlotPolicy p) {
  switch (p) {
    case SlotPolicy::Strict: return "strict";
    case SlotPolicy::WorkConserving: return "work-conserving";
    case SlotPolicy::Fifo: return "fifo";
  }
  return "?";
}

// A single-server station with a line-class and a page-class queue, served
// in a repeating 1-page : K-lines slot pattern. `Strict` keeps the pattern
// when a slot's queue is empty: the slot idles one `idle_penalty`, gets one
// re-check, then is forfeited. `WorkConserving` skips empty slots with zero
// delay. `Fifo` serves both classes in arrival order (shared queue).
//
// Jobs perform their own effects: `run(start)` returns the time the server
// frees (serialization end); downstream events are the job's business.
class SlotStation {
 public:
  struct Job {
    bool page_class = false;
    std::function<Tick(Tick start)> run;
  };

  SlotStation(EventQueue& eq, std::uint32_t target_id, SlotPolicy policy,
              std::uint32_t lines_per_page_slot, Tick idle_penalty, std::size_t line_capacity,
              std::size_t page_capacity)
      : eq_(eq),
        target_(target_id),
        policy_(policy),
        k_(lines_per_page_slot),
        idle_penalty_(idle_penalty),
        line_capacity_(line_capacity),
        page_capacity_(page_capacity),
        line_credit_(0) {}  // pattern starts on the page slot

  bool line_full() const { return line_count_ >= line_capacity_; }
  bool page_full() const { return page_count_ >= page_capacity_; }
  std::size_t line_size() const { return line_count_; }
  std::size_t page_size() const { return page_count_; }
  std::size_t line_capacity() const { return line_capacity_; }
  std::size_t page_capacity() const { return page_capacity_; }

  void push(Job job) {
    // Work arriving at a fully idle controller re-anchors the pattern at
    // its own class: with nothing in flight there is no bandwidth to
    // partition, and the ratio resumes with the next slot. Under
    // contention the queues never drain, so the slot pattern is exact.
    if (policy_ != SlotPolicy::Fifo && line_count_ + page_count_ == 0 &&
        eq_.now() >= server_free_) {
      line_credit_ = job.page_class ? 0 : k_;
      retried_slot_ = false;
    }
    if (job.page_class) {
      if (page_count_ >= page_capacity_) throw std::logic_error("page queue overflow");
      ++page_count_;
    } else {
      if (line_count_ >= line_capacity_) throw std::logic_error("sub-block queue overflow");
      ++line_count_;
    }
    if (policy_ == SlotPolicy::Fifo) {
      fifo_.push_back(std::move(job));
    } else if (job.page_class) {
      page_q_.push_back(std::move(job));
    } else {
      line_q_.push_back(std::move(job));
    }
    kick();
  }

  Tick server_free() const { return server_free_; }

  std::uint64_t issued_lines = 0;
  std::uint64_t issued_pages = 0;

 private:
  void kick() {
    if (eval_scheduled_) return;
    eval_scheduled_ = true;
    Tick at = std::max(eq_.now(), server_free_);
    eq_.schedule(at, target_, 0, [this] { evaluate(); });
  }

  void run_job(Job& job) {
    Tick start = std::max(eq_.now(), server_free_);
    server_free_ = job.run(start);
    if (job.page_class) {
      --page_count_;
      ++issued_pages;
    } else {
      --line_count_;
      ++issued_lines;
    }
  }

  void schedule_eval_at(Tick t) {
    eval_scheduled_ = true;
    eq_.schedule(t, target_, 0, [this] { evaluate(); });
  }

  void evaluate() {
    eval_scheduled_ = false;
    if (policy_ == SlotPolicy::Fifo) {
      if (fifo_.empty()) return;
      Job job = std::move(fifo_.front());
      fifo_.pop_front();
      run_job(job);
      schedule_eval_at(server_free_);
      return;
    }
    for (;;) {
      if (line_q_.empty() && page_q_.empty()) return;  // wake on next push
      bool page_slot = line_credit_ == 0;
      std::deque<Job>& q = page_slot ? page_q_ : line_q_;
      if (!q.empty()) {
        Job job = std::move(q.front());
        q.pop_front();
        run_job(job);
        advance_slot(page_slot);
        retried_slot_ = false;
        schedule_eval_at(server_free_);
        return;
      }
      if (policy_ == SlotPolicy::Strict) {
        if (!retried_slot_) {
          retried_slot_ = true;
          schedule_eval_at(std::max(eq_.now(), server_free_) + idle_penalty_);
          return;
        }
        retried_slot_ = false;
        advance_slot(page_slot);  // slot forfeited
        continue;
      }
      // work-conserving: skip the empty slot class entirely
      if (page_slot) {
        line_credit_ = k_;
      } else {
        line_credit_ = 0;
      }
    }
  }

  void advance_slot(bool was_page_slot) {
    if (was_page_slot) {
      line_credit_ = k_;
    } else {
      --line_credit_;
    }
  }

  EventQueue& eq_;
  std::uint32_t target_;
  SlotPolicy policy_;
  std::uint32_t k_;
  Tick idle_penalty_;
  std::size_t line_capacity_;
  std::size_t page_capacity_;

  std::deque<Job> line_q_, page_q_, fifo_;
  std::size_t line_count_ = 0, page_count_ = 0;
  std::uint32_t line_credit_;
  bool retried_slot_ = false;
  bool eval_scheduled_ = false;
  Tick server_free_ = 0;
};

}  // namespace dgsim
