#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dgsim/time.hpp"
#include "dgsim/workload.hpp"

namespace dgsim {

enum class PacketKind : std::uint8_t {
  LineRequest,
  LineData,
  PageRequest,
  PageData,
  DirtyLineWB,
  DirtyPageWB,
};

const char* to_string(PacketKind k);

constexpr std::uint32_t kPacketHeaderBytes = 16;

struct Packet {
  PacketKind kind = PacketKind::LineRequest;
  std::uint64_t page_id = 0;
  std::uint32_t line_offset = 0;       // line kinds only
  std::uint32_t payload_bytes = 0;     // on-wire size incl. header
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint64_t tag = 0;               // request correlation id
  std::vector<std::uint8_t> data;      // PageData carries the page image
};

struct DisturbanceWindow {
  Tick start = 0;
  Tick end = 0;
  double fraction = 0.0;  // of bandwidth consumed by background traffic
};

// One direction of a link: serialization at the effective bandwidth, then a
// fixed switch latency. Sends are in order; per-100us-interval bytes feed
// the utilization report.
class LinkDirection {
 public:
  LinkDirection(std::uint64_t bandwidth_bytes_per_s, Tick switch_latency,
                const std::vector<DisturbanceWindow>* disturbance)
      : bandwidth_(bandwidth_bytes_per_s),
        switch_latency_(switch_latency),
        disturbance_(disturbance) {}

  // Occupies the line from max(now, busy_until); returns the arrival time.
  Tick send(Tick now, std::uint32_t payload_bytes);

  Tick transfer_time(Tick now, std::uint32_t payload_bytes) const;
  std::uint64_t effective_bandwidth(Tick at) const;

  Tick busy_until() const { return busy_until_; }
  std::uint64_t total_bytes() const { return total_bytes_; }

  struct IntervalUtilization {
    std::uint64_t interval_index;
    double utilization;
  };
  std::vector<IntervalUtilization> interval_utilization() const;
  const std::map<std::uint64_t, std::uint64_t>& interval_bytes() const { return interval_bytes_; }

 private:
  std::uint64_t bandwidth_;
  Tick switch_latency_;
  const std::vector<DisturbanceWindow>* disturbance_;
  Tick busy_until_ = 0;
  std::uint64_t total_bytes_ = 0;
  std::map<std::uint64_t, std::uint64_t> interval_bytes_;
};

constexpr Tick kUtilizationIntervalTicks = ns_to_ticks(100000);

// Full-duplex link between the compute component and one memory component;
// request direction (up) and response direction (down) serialize
// independently.
class LinkModel {
 public:
  LinkModel(std::uint64_t bandwidth_bytes_per_s, Tick switch_latency)
      : bandwidth_(bandwidth_bytes_per_s),
        switch_latency_(switch_latency),
        up_(bandwidth_bytes_per_s, switch_latency, &disturbance_),
        down_(bandwidth_bytes_per_s, switch_latency, &disturbance_) {}

  void inject_disturbance(std::vector<DisturbanceWindow> windows);

  LinkDirection& up() { return up_; }
  LinkDirection& down() { return down_; }
  std::uint64_t bandwidth() const { return bandwidth_; }
  Tick switch_latency() const { return switch_latency_; }

 private:
  std::uint64_t bandwidth_;
  Tick switch_latency_;
  std::vector<DisturbanceWindow> disturbance_;
  LinkDirection up_;
  LinkDirection down_;
};

}  // namespace dgsim
