#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgsim/compute_engine.hpp"

namespace dgsim {

struct CoreMetrics {
  std::uint64_t records = 0;
  std::uint64_t cycles = 0;
  double pseudo_ipc = 0.0;
  double mean_access_latency_ns = 0.0;
};

struct UtilizationRow {
  std::uint64_t interval_start_ns = 0;
  std::string link_id;
  double utilization = 0.0;
};

struct RunMetrics {
  std::vector<CoreMetrics> cores;
  std::uint64_t total_cycles = 0;  // slowest core
  double pseudo_ipc = 0.0;         // total records / total cycles

  std::uint64_t local_lookups = 0;
  std::uint64_t local_hits = 0;
  double hit_ratio = 0.0;

  std::uint64_t remote_accesses = 0;
  double mean_remote_latency_ns = 0.0;
  double p50_remote_latency_ns = 0.0;
  double p95_remote_latency_ns = 0.0;
  double p99_remote_latency_ns = 0.0;

  std::uint64_t bytes_by_kind[6] = {0, 0, 0, 0, 0, 0};  // both directions
  std::uint64_t total_link_bytes = 0;

  EngineCounters counters;
  std::vector<UtilizationRow> utilization;
};

}  // namespace dgsim
