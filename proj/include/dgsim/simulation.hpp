#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "dgsim/compute_engine.hpp"
#include "dgsim/core_model.hpp"
#include "dgsim/event_queue.hpp"
#include "dgsim/local_memory.hpp"
#include "dgsim/memory_engine.hpp"
#include "dgsim/network.hpp"
#include "dgsim/schemes.hpp"
#include "dgsim/workload.hpp"

namespace dgsim {

struct SimulationParams {
  SchemeConfig scheme;
  SlotPolicy controller_policy = SlotPolicy::Strict;
  std::uint32_t window_limit = 128;
  std::size_t llc_dirty_capacity = 4096;
  Tick cycle_ticks = kDefaultCycleTicks;

  std::uint64_t local_capacity_pages = 0;  // 0 -> derived by the experiment layer
  ReplacementPolicy replacement = ReplacementPolicy::ApproxLru;
  std::uint64_t bus_bandwidth = 17ULL * 1000 * 1000 * 1000;
  Tick processing_latency = ns_to_ticks(15);

  std::uint32_t n_memory_components = 1;
  PageHomePolicy home_policy = PageHomePolicy::RoundRobin;
  std::uint64_t home_seed = 1;
  // Per memory component; a single entry broadcasts.
  std::vector<double> bandwidth_factors{0.25};
  std::vector<Tick> switch_latencies{ns_to_ticks(100)};
  std::vector<DisturbanceWindow> disturbance;

  ContentModel content;
  std::uint64_t total_pages = 0;  // address-space bound; requests past it are config errors

  std::size_t sub_buffer_capacity = 128;
  std::size_t page_buffer_capacity = 256;
  std::size_t sub_queue_capacity = 128;
  std::size_t page_queue_capacity = 256;
  std::size_t dirty_buffer_capacity = 256;
  std::size_t mem_line_queue_capacity = 512;
  std::size_t mem_page_queue_capacity = 1024;
  std::uint32_t dirty_threshold = 8;
};

// One simulator instance: the event loop plus cores, engines, links and the
// local memory, wired per scheme. Not shareable across threads; independent
// instances may run in parallel.
class Simulation {
 public:
  Simulation(const SimulationParams& params, std::vector<std::vector<TraceRecord>> traces);

  // Runs to event exhaustion and returns the final clock value.
  Tick run();

  Core& core(std::size_t i) { return *cores_[i]; }
  std::size_t n_cores() const { return cores_.size(); }
  ComputeEngine& engine() { return *engine_; }
  MemoryEngine& memory(std::size_t i) { return *memories_[i]; }
  std::size_t n_memories() const { return memories_.size(); }
  LinkModel& link(std::size_t i) { return *links_[i]; }
  LocalMemory& local_memory() { return *local_; }
  EventQueue& event_queue() { return eq_; }
  const SimulationParams& params() const { return params_; }

  // backing stores + resident local pages + dirty buffers + LLC dirty lines
  std::unordered_map<std::uint64_t, PageImage> final_memory_image() const;

  // Independent sequential-replay oracle for the same traces and content.
  static std::unordered_map<std::uint64_t, PageImage> replay_oracle(
      const std::vector<std::vector<TraceRecord>>& traces, const ContentModel& content);

  bool all_requests_completed() const;

 private:
  SimulationParams params_;
  EventQueue eq_;
  std::unique_ptr<LocalMemory> local_;
  std::vector<std::unique_ptr<LinkModel>> links_;
  std::vector<std::unique_ptr<MemoryEngine>> memories_;
  std::unique_ptr<ComputeEngine> engine_;
  std::unique_ptr<LlcDirtySet> llc_;
  std::vector<std::unique_ptr<Core>> cores_;
  std::uint64_t issued_total_ = 0;
};

}  // namespace dgsim
