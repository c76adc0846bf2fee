#include "dgsim/simulation.hpp"

#include <cstring>
#include <stdexcept>

namespace dgsim {

Simulation::Simulation(const SimulationParams& params,
                       std::vector<std::vector<TraceRecord>> traces)
    : params_(params) {
  if (traces.empty()) throw std::invalid_argument("at least one trace required");
  if (params.n_memory_components < 1)
    throw std::invalid_argument("n_memory_components must be >= 1");

  std::uint64_t total_pages = params.total_pages;
  if (total_pages == 0) {
    for (const auto& t : traces)
      for (const TraceRecord& r : t) total_pages = std::max(total_pages, page_of(r.address) + 1);
  }

  const SchemeConfig& scheme = params.scheme;
  std::uint64_t local_capacity = params.local_capacity_pages;
  if (scheme.local_full_working_set) local_capacity = total_pages;
  if (scheme.local_memory)
    local_ = std::make_unique<LocalMemory>(local_capacity, params.replacement,
                                           params.bus_bandwidth, params.processing_latency);

  auto per_component = [&](const auto& v, std::uint32_t i) {
    return v.size() == 1 ? v[0] : v.at(i);
  };

  std::uint32_t k = scheme.partitioned ? partition_lines_per_page(scheme.partition_ratio) : 1;
  SlotPolicy mem_policy = scheme.partitioned ? params.controller_policy : SlotPolicy::Fifo;

  for (std::uint32_t i = 0; i < params.n_memory_components; ++i) {
    double factor = per_component(params.bandwidth_factors, i);
    if (factor <= 0.0) throw std::invalid_argument("bandwidth_factor must be positive");
    std::uint64_t bw = static_cast<std::uint64_t>(static_cast<double>(params.bus_bandwidth) *
                                                  factor);
    links_.push_back(std::make_unique<LinkModel>(bw, per_component(params.switch_latencies, i)));
    if (!params.disturbance.empty()) links_.back()->inject_disturbance(params.disturbance);
  }

  for (std::uint32_t i = 0; i < params.n_memory_components; ++i) {
    MemoryEngineParams mp;
    mp.id = i;
    mp.bus_bandwidth = params.bus_bandwidth;
    mp.processing_latency = params.processing_latency;
    mp.policy = mem_policy;
    mp.lines_per_page_slot = k;
    mp.codec = scheme.codec;
    mp.cycle_ticks = params.cycle_ticks;
    mp.content = &params_.content;
    mp.max_pages = total_pages;
    mp.line_queue_capacity = params.mem_line_queue_capacity;
    mp.page_queue_capacity = params.mem_page_queue_capacity;
    memories_.push_back(std::make_unique<MemoryEngine>(
        eq_, mp, links_[i].get(), [this](Packet pkt) { engine_->deliver(std::move(pkt)); },
        [this](std::uint64_t page) { engine_->on_page_transfer_started(page); }));
  }

  ComputeEngineParams ep;
  ep.scheme = scheme;
  ep.controller_policy = params.controller_policy;
  ep.sub_buffer_capacity = params.sub_buffer_capacity;
  ep.page_buffer_capacity = params.page_buffer_capacity;
  ep.sub_queue_capacity = params.sub_queue_capacity;
  ep.page_queue_capacity = params.page_queue_capacity;
  ep.dirty_buffer_capacity = params.dirty_buffer_capacity;
  ep.dirty_threshold = params.dirty_threshold;
  ep.cycle_ticks = params.cycle_ticks;
  ep.home_policy = params.home_policy;
  ep.home_seed = params.home_seed;
  ep.mem_processing_latency = params.processing_latency;
  ep.mem_bus_bandwidth = params.bus_bandwidth;

  std::vector<LinkModel*> link_ptrs;
  std::vector<MemoryEngine*> mem_ptrs;
  for (auto& l : links_) link_ptrs.push_back(l.get());
  for (auto& m : memories_) mem_ptrs.push_back(m.get());

  engine_ = std::make_unique<ComputeEngine>(
      eq_, ep, local_.get(), std::move(link_ptrs), std::move(mem_ptrs),
      [this](AccessRequest* req) { cores_[req->core_id]->on_complete(req); });

  llc_ = std::make_unique<LlcDirtySet>(params.llc_dirty_capacity);

  for (std::size_t c = 0; c < traces.size(); ++c) {
    issued_total_ += traces[c].size();
    cores_.push_back(std::make_unique<Core>(eq_, static_cast<std::uint32_t>(c),
                                            std::move(traces[c]), params.window_limit,
                                            params.cycle_ticks, engine_.get(), llc_.get()));
  }

  if (scheme.local_full_working_set) {
    // Warm start: the whole working set is resident and clean.
    for (std::uint64_t p = 0; p < total_pages; ++p)
      local_->install(p, memories_[engine_->home_of(p)]->backing_page(p), false);
  }
}

Tick Simulation::run() {
  for (auto& core : cores_) core->start();
  return eq_.run_all();
}

bool Simulation::all_requests_completed() const {
  std::uint64_t done = 0;
  for (const auto& core : cores_) done += core->instructions();
  return done == issued_total_ && engine_->counters().completions == issued_total_;
}

std::unordered_map<std::uint64_t, PageImage> Simulation::final_memory_image() const {
  std::unordered_map<std::uint64_t, PageImage> image;
  for (const auto& mem : memories_)
    for (const auto& [page, bytes] : mem->backing()) image[page] = bytes;
  if (local_) {
    for (std::uint64_t page : local_->resident_pages()) image[page] = local_->page_bytes(page);
  }
  engine_->overlay_dirty_buffer(image);
  for (const auto& line : llc_->dirty_lines()) {
    auto it = image.find(page_of(line.address));
    if (it == image.end()) continue;
    std::memcpy(it->second.data() + line_offset_of(line.address) * kLineBytes, line.value.data(),
                kLineBytes);
  }
  return image;
}

std::unordered_map<std::uint64_t, PageImage> Simulation::replay_oracle(
    const std::vector<std::vector<TraceRecord>>& traces, const ContentModel& content) {
  std::unordered_map<std::uint64_t, PageImage> image;
  auto page_ref = [&](std::uint64_t page) -> PageImage& {
    auto it = image.find(page);
    if (it == image.end()) it = image.emplace(page, content.synthesize(page)).first;
    return it->second;
  };
  for (std::size_t c = 0; c < traces.size(); ++c) {
    for (std::size_t i = 0; i < traces[c].size(); ++i) {
      const TraceRecord& rec = traces[c][i];
      PageImage& page = page_ref(page_of(rec.address));
      if (rec.op == Op::Write) {
        auto value = write_value(static_cast<std::uint32_t>(c), i, rec.address);
        std::memcpy(page.data() + line_offset_of(rec.address) * kLineBytes, value.data(),
                    kLineBytes);
      }
    }
  }
  return image;
}

}  // namespace dgsim
