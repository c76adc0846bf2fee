#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "dgsim/core_model.hpp"
#include "dgsim/event_queue.hpp"
#include "dgsim/local_memory.hpp"
#include "dgsim/memory_engine.hpp"
#include "dgsim/network.hpp"
#include "dgsim/schemes.hpp"
#include "dgsim/slot_station.hpp"

namespace dgsim {

enum class PageEntryState : std::uint8_t { Scheduled, Moved, Throttled };

struct EngineCounters {
  std::uint64_t local_lookups = 0;
  std::uint64_t local_hits = 0;
  std::uint64_t issued_lines = 0;         // line requests issued by the controller
  std::uint64_t issued_pages = 0;         // page requests issued by the controller
  std::uint64_t line_slot_bytes = 0;      // nominal 64 B per issued line request
  std::uint64_t page_slot_bytes = 0;      // nominal 4096 B per issued page request
  std::uint64_t dropped_lines = 0;        // selection unit declined the line
  std::uint64_t dropped_lines_moved = 0;  //   ... because the page already left the queue
  std::uint64_t dropped_lines_util = 0;   //   ... because the sub-block side was busier
  std::uint64_t suppressed_page_requests = 0;
  std::uint64_t discarded_line_data = 0;  // late line after its page installed
  std::uint64_t discarded_page_arrivals = 0;
  std::uint64_t throttled_pages = 0;
  std::uint64_t rerequested_pages = 0;
  std::uint64_t recovered_pages = 0;      // re-requested pages that installed
  std::uint64_t installed_pages = 0;
  std::uint64_t dirty_line_wbs = 0;
  std::uint64_t dirty_page_wbs = 0;
  std::uint64_t dirty_lines_buffered = 0;
  std::uint64_t dirty_buffer_flushes = 0;
  std::uint64_t stalled_requests = 0;
  std::uint64_t completions = 0;
};

struct ComputeEngineParams {
  SchemeConfig scheme;
  SlotPolicy controller_policy = SlotPolicy::Strict;  // partitioned schemes only
  std::size_t sub_buffer_capacity = 128;
  std::size_t page_buffer_capacity = 256;
  std::size_t sub_queue_capacity = 128;
  std::size_t page_queue_capacity = 256;
  std::size_t dirty_buffer_capacity = 256;
  std::uint32_t dirty_threshold = 8;
  Tick cycle_ticks = kDefaultCycleTicks;
  PageHomePolicy home_policy = PageHomePolicy::RoundRobin;
  std::uint64_t home_seed = 1;
  // memory-side access parameters, used for the PageFree analytic round trip
  Tick mem_processing_latency = ns_to_ticks(15);
  std::uint64_t mem_bus_bandwidth = 17ULL * 1000 * 1000 * 1000;
};

// The compute-side engine: sub-block and page queues behind the slot
// controller, the inflight buffers, the selection-granularity unit and the
// dirty-data protocol.
class ComputeEngine {
 public:
  using CompleteCallback = std::function<void(AccessRequest*)>;

  ComputeEngine(EventQueue& eq, const ComputeEngineParams& params, LocalMemory* local,
                std::vector<LinkModel*> links, std::vector<MemoryEngine*> memories,
                CompleteCallback on_complete);

  // Entry point from a core at issue time.
  void core_access(AccessRequest* req);

  // Reply arrival from a memory component.
  void deliver(Packet pkt);

  // The memory engine began serializing this page's data onto the link.
  void on_page_transfer_started(std::uint64_t page);

  // Dirty line evicted from the LLC bookkeeping model.
  void dirty_eviction(std::uint64_t address, const std::array<std::uint8_t, kLineBytes>& value);

  // Reconstruction support: buffered dirty lines overlaid onto an image.
  void overlay_dirty_buffer(std::unordered_map<std::uint64_t, PageImage>& image) const;

  const EngineCounters& counters() const { return counters_; }
  const std::vector<Tick>& remote_latencies() const { return remote_latencies_; }
  const std::uint64_t* bytes_up_by_kind() const { return bytes_up_by_kind_; }
  SlotStation& egress() { return egress_; }

  // Inspection hooks for protocol tests.
  bool has_page_entry(std::uint64_t page) const { return page_entries_.count(page) != 0; }
  PageEntryState page_entry_state(std::uint64_t page) const {
    return page_entries_.at(page).state;
  }
  std::uint64_t page_entry_dirty_mask(std::uint64_t page) const {
    return page_entries_.at(page).dirty_mask;
  }
  std::size_t dirty_buffer_size() const { return dirty_buffer_.size(); }
  std::size_t sub_buffer_size() const { return sub_entries_.size(); }
  std::size_t page_buffer_size() const { return page_entries_.size(); }

  void dump_counters(std::ostream& os) const;

  std::uint32_t home_of(std::uint64_t page) const {
    return page_home(page, static_cast<std::uint32_t>(memories_.size()), params_.home_policy,
                     params_.home_seed);
  }

 private:
  struct PageEntry {
    PageEntryState state = PageEntryState::Scheduled;
    std::uint64_t dirty_mask = 0;  // offsets buffered in the dirty data buffer
    bool was_throttled = false;
    std::vector<AccessRequest*> waiters;
  };

  struct SubEntry {
    std::uint64_t offset_mask = 0;
    std::unordered_map<std::uint32_t, std::vector<AccessRequest*>> waiters;
  };

  void handle_miss(AccessRequest* req);
  void handle_miss_page_free(AccessRequest* req, std::uint64_t page);
  void schedule_page_request(std::uint64_t page);
  void issue_page_request_job(std::uint64_t page);
  void line_or_fallback(AccessRequest* req, std::uint64_t page, std::uint32_t offset,
                        PageEntry* pe);
  enum class CompletionPath : std::uint8_t { LocalHit, LineServed, InstallServed };
  void install_page(Packet& pkt);
  void emit_dirty_line_wb(std::uint64_t address, const std::array<std::uint8_t, kLineBytes>& value);
  void emit_dirty_page_wb(EvictedPage victim, Tick ready_at);
  void flush_and_throttle(std::uint64_t page, PageEntry& entry, std::uint64_t address,
                          const std::array<std::uint8_t, kLineBytes>& value);
  void complete(AccessRequest* req, Tick at, CompletionPath path);
  void send_packet_job(Packet pkt, bool page_class);
  void stall(AccessRequest* req);
  void maybe_schedule_drain();
  void drain_pending();

  EventQueue& eq_;
  ComputeEngineParams params_;
  SchemeConfig scheme_;
  LocalMemory* local_;
  std::vector<LinkModel*> links_;
  std::vector<MemoryEngine*> memories_;
  CompleteCallback on_complete_;
  SlotStation egress_;

  std::unordered_map<std::uint64_t, PageEntry> page_entries_;
  std::unordered_map<std::uint64_t, SubEntry> sub_entries_;
  std::uint64_t pending_line_offsets_ = 0;  // set bits across all sub entries
  // key = page_id * 64 + offset
  std::unordered_map<std::uint64_t, std::array<std::uint8_t, kLineBytes>> dirty_buffer_;

  std::deque<AccessRequest*> pending_stalled_;
  std::deque<Packet> pending_wbs_;
  std::deque<std::uint64_t> pending_rerequests_;
  bool drain_scheduled_ = false;

  EngineCounters counters_;
  std::vector<Tick> remote_latencies_;
  std::uint64_t bytes_up_by_kind_[6] = {0, 0, 0, 0, 0, 0};
  std::uint64_t next_tag_ = 1;
};

}  // namespace dgsim
