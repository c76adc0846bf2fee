#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>

#include "dgsim/compression.hpp"
#include "dgsim/event_queue.hpp"
#include "dgsim/network.hpp"
#include "dgsim/slot_station.hpp"
#include "dgsim/workload.hpp"

namespace dgsim {

// Homing policy across memory components.
enum class PageHomePolicy : std::uint8_t { RoundRobin, Random };
std::uint32_t page_home(std::uint64_t page_id, std::uint32_t n_components, PageHomePolicy policy,
                        std::uint64_t seed);

struct MemoryEngineParams {
  std::uint32_t id = 0;
  std::uint64_t bus_bandwidth = 17ULL * 1000 * 1000 * 1000;
  Tick processing_latency = ns_to_ticks(15);
  SlotPolicy policy = SlotPolicy::Fifo;
  std::uint32_t lines_per_page_slot = 21;
  CodecId codec = CodecId::None;
  Tick cycle_ticks = kDefaultCycleTicks;
  const ContentModel* content = nullptr;
  std::uint64_t max_pages = UINT64_MAX;  // requests past this are config errors
  std::size_t line_queue_capacity = 512;
  std::size_t page_queue_capacity = 1024;
};

// One memory component: address translation charged as one DRAM access per
// request, DRAM bus occupancy partitioned by the same slot pattern as the
// compute engine, page compression on the way out, and the backing-store
// ground truth.
class MemoryEngine {
 public:
  using Deliver = std::function<void(Packet)>;
  using TransferStart = std::function<void(std::uint64_t)>;

  MemoryEngine(EventQueue& eq, const MemoryEngineParams& params, LinkModel* link,
               Deliver deliver_to_compute, TransferStart page_transfer_started = {});

  // Request or writeback arrival from the network.
  void on_packet(Packet pkt);

  // Functional ground truth. Writeback values are applied at packet
  // creation on the compute side; the packets themselves carry timing only.
  PageImage& backing_page(std::uint64_t page_id);
  void apply_line_write(std::uint64_t address, const std::uint8_t* line64);
  void apply_page_write(std::uint64_t page_id, const PageImage& bytes);

  // Wire size the reply for this page will have under the engine codec;
  // memoized until a writeback touches the page.
  std::uint32_t page_reply_bytes(std::uint64_t page_id);
  const std::unordered_map<std::uint64_t, PageImage>& backing() const { return backing_; }

  std::uint64_t served_line_requests = 0;
  std::uint64_t served_page_requests = 0;
  std::uint64_t served_writebacks = 0;
  std::uint64_t bus_busy_ticks = 0;
  std::uint64_t bytes_down_by_kind[6] = {0, 0, 0, 0, 0, 0};

  SlotStation& bus() { return bus_; }
  SlotStation& egress() { return egress_; }

 private:
  void enqueue_reply(Packet pkt, bool page_class);
  void push_bus_job(SlotStation::Job job);
  void drain_staged();
  void maybe_drain_staged();

  EventQueue& eq_;
  MemoryEngineParams params_;
  LinkModel* link_;
  Deliver deliver_;
  TransferStart page_transfer_started_;
  Tick line_bus_;
  Tick page_bus_;
  SlotStation bus_;
  SlotStation egress_;
  std::deque<SlotStation::Job> staged_;  // arrivals waiting for queue space
  bool drain_scheduled_ = false;
  std::unordered_map<std::uint64_t, PageImage> backing_;
  std::unordered_map<std::uint64_t, std::uint32_t> reply_size_cache_;
};

}  // namespace dgsim
