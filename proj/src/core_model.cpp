#include "dgsim/core_model.hpp"

#include "dgsim/compute_engine.hpp"

namespace dgsim {

namespace {
constexpr std::uint32_t kKindStep = 1;
}

Core::Core(EventQueue& eq, std::uint32_t id, std::vector<TraceRecord> trace,
           std::uint32_t window_limit, Tick cycle_ticks, ComputeEngine* engine, LlcDirtySet* llc)
    : eq_(eq),
      id_(id),
      trace_(std::move(trace)),
      window_limit_(window_limit),
      cycle_ticks_(cycle_ticks),
      engine_(engine),
      llc_(llc) {}

void Core::start() {
  if (trace_.empty()) return;
  schedule_step(Tick(trace_[0].gap) * cycle_ticks_);
}

void Core::schedule_step(Tick at) {
  if (step_scheduled_) return;
  step_scheduled_ = true;
  eq_.schedule(at, id_, kKindStep, [this] { step(); });
}

void Core::step() {
  step_scheduled_ = false;
  if (next_index_ >= trace_.size()) return;
  if (window_.size() >= window_limit_) {
    // window full: hold the record until the oldest outstanding retires
    waiting_for_slot_ = true;
    stall_started_ = eq_.now();
    return;
  }
  const TraceRecord& rec = trace_[next_index_];
  window_.emplace_back();
  AccessRequest& req = window_.back();
  req.core_id = id_;
  req.trace_index = next_index_;
  req.address = rec.address;
  req.op = rec.op;
  req.issue_time = eq_.now();
  if (rec.op == Op::Write)
    llc_->update_value(rec.address, write_value(id_, next_index_, rec.address), next_index_);
  ++next_index_;
  if (eq_.now() > finish_tick_) finish_tick_ = eq_.now();
  engine_->core_access(&req);
  if (next_index_ < trace_.size())
    schedule_step(eq_.now() + Tick(trace_[next_index_].gap) * cycle_ticks_);
}

void Core::on_complete(AccessRequest* req) {
  Tick now = eq_.now();
  ++completed_;
  total_latency_ += now - req->issue_time;
  if (now > finish_tick_) finish_tick_ = now;
  if (req->op == Op::Write) {
    auto evicted = llc_->complete_write(req->address);
    if (evicted) engine_->dirty_eviction(evicted->address, evicted->value);
  }
  while (!window_.empty() && window_.front().completed) window_.pop_front();
  if (waiting_for_slot_ && window_.size() < window_limit_) {
    waiting_for_slot_ = false;
    stalled_ticks_ += now - stall_started_;
    schedule_step(now);
  }
}

}  // namespace dgsim
