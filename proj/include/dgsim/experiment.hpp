#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgsim/metrics.hpp"
#include "dgsim/simulation.hpp"

namespace dgsim {

struct WorkloadSpec {
  WorkloadConfig config;
  std::string trace_path;  // non-empty -> replay this file instead of generating
  bool seed_explicit = false;
};

struct ExperimentConfig {
  std::string scheme = "Remote";
  std::optional<double> partition_ratio;
  std::optional<std::string> codec;
  std::vector<double> switch_latency_ns{100.0};   // per memory component
  std::vector<double> bandwidth_factor{0.25};     // fraction of the 17 GB/s bus
  std::string replacement_policy = "lru";
  double local_memory_fraction = 0.20;
  std::optional<std::uint64_t> local_memory_pages;
  std::uint32_t n_cores = 1;
  std::uint32_t n_memory_components = 1;
  std::string page_home_policy = "round_robin";
  std::string controller_policy = "strict";
  std::uint32_t window_limit = 128;
  std::uint64_t llc_dirty_capacity = 4096;
  std::uint32_t dirty_threshold = 8;
  double cpu_ghz = 3.6;
  std::uint64_t seed = 1;
  std::vector<WorkloadSpec> workloads;  // one per core; a single entry broadcasts
  std::vector<DisturbanceWindow> disturbance;  // ticks

  void validate() const;
};

// `key = value` sections or a JSON document; sniffed by the first
// non-whitespace byte.
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& name = "<config>");

struct PreparedRun {
  SimulationParams sim;
  std::vector<std::vector<TraceRecord>> traces;
};

// Materializes traces (with per-core address offsets) and simulator
// parameters from a validated config.
PreparedRun prepare_run(const ExperimentConfig& config);

RunMetrics run_experiment(const ExperimentConfig& config);
RunMetrics collect_metrics(Simulation& sim);

// Deterministic CSV: one row per core plus a utilization block.
std::string metrics_csv(const ExperimentConfig& config, const RunMetrics& metrics);

// Axis spec: "scheme=Remote,DaeMon;switch_latency_ns=100,400;bandwidth_factor=1/2,1/4".
// Axis keys: scheme, switch_latency_ns, bandwidth_factor, partition_ratio,
// codec, replacement_policy.
struct SweepAxes {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};
SweepAxes parse_axes(const std::string& spec);

// One row per cell; speedup column normalized to the baseline scheme at the
// same point of every other axis.
std::string run_sweep(const ExperimentConfig& base, const SweepAxes& axes,
                      const std::string& baseline = "Remote");

double parse_fraction(const std::string& s);  // "1/4" or "0.25"

// Named workload presets used by the acceptance trend runs.
WorkloadConfig preset_workload(LocalityClass locality);

}  // namespace dgsim
