#include "dgsim/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace dgsim {

const char* to_string(PacketKind k) {
  switch (k) {
    case PacketKind::LineRequest: return "line_req";
    case PacketKind::LineData: return "line_data";
    case PacketKind::PageRequest: return "page_req";
    case PacketKind::PageData: return "page_data";
    case PacketKind::DirtyLineWB: return "dirty_line_wb";
    case PacketKind::DirtyPageWB: return "dirty_page_wb";
  }
  return "?";
}

std::uint64_t LinkDirection::effective_bandwidth(Tick at) const {
  double fraction = 0.0;
  if (disturbance_) {
    for (const DisturbanceWindow& w : *disturbance_) {
      if (at >= w.start && at < w.end) {
        fraction = w.fraction;
        break;
      }
    }
  }
  if (fraction <= 0.0) return bandwidth_;
  double eff = static_cast<double>(bandwidth_) * (1.0 - fraction);
  return eff < 1.0 ? 1 : static_cast<std::uint64_t>(eff);
}

Tick LinkDirection::transfer_time(Tick now, std::uint32_t payload_bytes) const {
  return switch_latency_ + serialization_ticks(payload_bytes, effective_bandwidth(now));
}

Tick LinkDirection::send(Tick now, std::uint32_t payload_bytes) {
  Tick start = std::max(now, busy_until_);
  Tick ser = serialization_ticks(payload_bytes, effective_bandwidth(start));
  busy_until_ = start + ser;
  total_bytes_ += payload_bytes;
  // Bytes are spread over the intervals the serialization covers, exactly
  // conserving the total.
  std::uint64_t remaining = payload_bytes;
  Tick at = start;
  while (remaining > 0) {
    Tick interval_end = (at / kUtilizationIntervalTicks + 1) * kUtilizationIntervalTicks;
    if (busy_until_ <= interval_end || ser == 0) {
      interval_bytes_[at / kUtilizationIntervalTicks] += remaining;
      break;
    }
    Tick span = interval_end - at;
    std::uint64_t chunk = payload_bytes * span / ser;
    chunk = std::min(chunk, remaining);
    interval_bytes_[at / kUtilizationIntervalTicks] += chunk;
    remaining -= chunk;
    at = interval_end;
  }
  return busy_until_ + switch_latency_;
}

std::vector<LinkDirection::IntervalUtilization> LinkDirection::interval_utilization() const {
  std::vector<IntervalUtilization> out;
  // capacity per interval at nominal bandwidth, in bytes
  double capacity = static_cast<double>(bandwidth_) *
                    (static_cast<double>(kUtilizationIntervalTicks) / 1e12);
  for (const auto& [idx, bytes] : interval_bytes_)
    out.push_back({idx, static_cast<double>(bytes) / capacity});
  return out;
}

void LinkModel::inject_disturbance(std::vector<DisturbanceWindow> windows) {
  std::sort(windows.begin(), windows.end(),
            [](const DisturbanceWindow& a, const DisturbanceWindow& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const DisturbanceWindow& w = windows[i];
    if (w.fraction < 0.0 || w.fraction > 1.0)
      throw std::invalid_argument("disturbance fraction must be in [0,1]");
    if (w.end < w.start) throw std::invalid_argument("disturbance window end < start");
    if (i > 0 && w.start < windows[i - 1].end)
      throw std::invalid_argument("disturbance windows overlap");
  }
  disturbance_ = std::move(windows);
}

}  // namespace dgsim
