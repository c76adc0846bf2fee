#include "dgsim/memory_engine.hpp"

#include <cstring>
#include <stdexcept>

#include "dgsim/rng.hpp"

namespace dgsim {

std::uint32_t page_home(std::uint64_t page_id, std::uint32_t n_components, PageHomePolicy policy,
                        std::uint64_t seed) {
  if (n_components == 0) throw std::invalid_argument("page_home: n_components must be >= 1");
  if (policy == PageHomePolicy::RoundRobin)
    return static_cast<std::uint32_t>(page_id % n_components);
  return static_cast<std::uint32_t>(splitmix64(page_id ^ splitmix64(seed)) % n_components);
}

namespace {
// Component-id space: memory engine k gets 200+3k for itself, +1 bus, +2 egress.
constexpr std::uint32_t kMemTargetBase = 200;
}  // namespace

MemoryEngine::MemoryEngine(EventQueue& eq, const MemoryEngineParams& params, LinkModel* link,
                           Deliver deliver_to_compute, TransferStart page_transfer_started)
    : eq_(eq),
      params_(params),
      link_(link),
      deliver_(std::move(deliver_to_compute)),
      page_transfer_started_(std::move(page_transfer_started)),
      line_bus_(serialization_ticks(kLineBytes, params.bus_bandwidth)),
      page_bus_(serialization_ticks(kPageBytes, params.bus_bandwidth)),
      // Idle penalty for a wasted slot: the bus time of one line job
      // (translation access + line access).
      bus_(eq, kMemTargetBase + 3 * params.id + 1, params.policy, params.lines_per_page_slot,
           2 * line_bus_, params.line_queue_capacity, params.page_queue_capacity),
      egress_(eq, kMemTargetBase + 3 * params.id + 2, params.policy, params.lines_per_page_slot,
              serialization_ticks(kLineBytes + kPacketHeaderBytes, link->bandwidth()),
              1u << 20, 1u << 20) {}

PageImage& MemoryEngine::backing_page(std::uint64_t page_id) {
  auto it = backing_.find(page_id);
  if (it == backing_.end()) it = backing_.emplace(page_id, params_.content->synthesize(page_id)).first;
  return it->second;
}

void MemoryEngine::apply_line_write(std::uint64_t address, const std::uint8_t* line64) {
  PageImage& page = backing_page(page_of(address));
  std::memcpy(page.data() + line_offset_of(address) * kLineBytes, line64, kLineBytes);
  reply_size_cache_.erase(page_of(address));
}

void MemoryEngine::apply_page_write(std::uint64_t page_id, const PageImage& bytes) {
  backing_page(page_id) = bytes;
  reply_size_cache_.erase(page_id);
}

std::uint32_t MemoryEngine::page_reply_bytes(std::uint64_t page_id) {
  if (params_.codec == CodecId::None) return kPageBytes + kPacketHeaderBytes;
  auto it = reply_size_cache_.find(page_id);
  if (it == reply_size_cache_.end()) {
    std::uint32_t size =
        compress_page(params_.codec, backing_page(page_id)).compressed_size() +
        kPacketHeaderBytes;
    it = reply_size_cache_.emplace(page_id, size).first;
  }
  return it->second;
}

void MemoryEngine::enqueue_reply(Packet pkt, bool page_class) {
  SlotStation::Job job;
  job.page_class = page_class;
  job.run = [this, pkt = std::move(pkt)](Tick start) mutable {
    if (pkt.kind == PacketKind::PageData && page_transfer_started_)
      page_transfer_started_(pkt.page_id);
    bytes_down_by_kind[static_cast<int>(pkt.kind)] += pkt.payload_bytes;
    Tick arrival = link_->down().send(start, pkt.payload_bytes);
    Tick free_at = link_->down().busy_until();
    eq_.schedule(arrival, kMemTargetBase + 3 * params_.id, 2,
                 [this, pkt = std::move(pkt)]() mutable { deliver_(std::move(pkt)); });
    return free_at;
  };
  egress_.push(std::move(job));
}

void MemoryEngine::push_bus_job(SlotStation::Job job) {
  bool full = job.page_class ? bus_.page_full() : bus_.line_full();
  if (full) {
    // The hardware queue is momentarily full; the packet waits in the
    // arrival (packet) buffer.
    staged_.push_back(std::move(job));
    return;
  }
  bus_.push(std::move(job));
}

void MemoryEngine::drain_staged() {
  drain_scheduled_ = false;
  std::size_t n = staged_.size();
  while (n-- > 0 && !staged_.empty()) {
    SlotStation::Job& front = staged_.front();
    bool full = front.page_class ? bus_.page_full() : bus_.line_full();
    if (full) break;
    SlotStation::Job job = std::move(front);
    staged_.pop_front();
    bus_.push(std::move(job));
  }
}

void MemoryEngine::maybe_drain_staged() {
  if (staged_.empty() || drain_scheduled_) return;
  drain_scheduled_ = true;
  eq_.schedule(eq_.now(), kMemTargetBase + 3 * params_.id, 4, [this] { drain_staged(); });
}

void MemoryEngine::on_packet(Packet pkt) {
  if (pkt.page_id >= params_.max_pages)
    throw std::runtime_error("memory engine: request outside the configured working set (page " +
                             std::to_string(pkt.page_id) + ")");
  switch (pkt.kind) {
    case PacketKind::LineRequest: {
      SlotStation::Job job;
      job.page_class = false;
      job.run = [this, pkt](Tick start) {
        // bus occupancy: translation access + 64 B read; the two processing
        // latencies pipeline on top
        Tick busy = 2 * line_bus_;
        bus_busy_ticks += busy;
        Tick done = start + 2 * params_.processing_latency + busy;
        ++served_line_requests;
        Packet reply;
        reply.kind = PacketKind::LineData;
        reply.page_id = pkt.page_id;
        reply.line_offset = pkt.line_offset;
        reply.payload_bytes = kLineBytes + kPacketHeaderBytes;
        reply.src = params_.id;
        reply.dst = pkt.src;
        reply.tag = pkt.tag;
        eq_.schedule(done, kMemTargetBase + 3 * params_.id, 3,
                     [this, reply = std::move(reply)]() mutable {
                       enqueue_reply(std::move(reply), false);
                     });
        maybe_drain_staged();
        return start + busy;
      };
      push_bus_job(std::move(job));
      break;
    }
    case PacketKind::PageRequest: {
      SlotStation::Job job;
      job.page_class = true;
      job.run = [this, pkt](Tick start) {
        Tick busy = line_bus_ + page_bus_;
        bus_busy_ticks += busy;
        Tick done = start + 2 * params_.processing_latency + busy;
        ++served_page_requests;
        // Sample the page image when the read completes; compress on the
        // way out.
        Packet reply;
        reply.kind = PacketKind::PageData;
        reply.page_id = pkt.page_id;
        reply.src = params_.id;
        reply.dst = pkt.src;
        reply.tag = pkt.tag;
        eq_.schedule(done, kMemTargetBase + 3 * params_.id, 3,
                     [this, reply = std::move(reply)]() mutable {
                       const PageImage& image = backing_page(reply.page_id);
                       Tick ready = eq_.now();
                       reply.payload_bytes = page_reply_bytes(reply.page_id);
                       if (params_.codec != CodecId::None) {
                         ready += Tick(latency_cycles(params_.codec, CodecDirection::Compress)) *
                                  params_.cycle_ticks;
                       }
                       reply.data.assign(image.begin(), image.end());
                       eq_.schedule(ready, kMemTargetBase + 3 * params_.id, 3,
                                    [this, reply = std::move(reply)]() mutable {
                                      enqueue_reply(std::move(reply), true);
                                    });
                     });
        maybe_drain_staged();
        return start + busy;
      };
      push_bus_job(std::move(job));
      break;
    }
    case PacketKind::DirtyLineWB: {
      SlotStation::Job job;
      job.page_class = false;
      job.run = [this](Tick start) {
        Tick busy = 2 * line_bus_;
        bus_busy_ticks += busy;
        ++served_writebacks;
        maybe_drain_staged();
        return start + busy;
      };
      push_bus_job(std::move(job));
      break;
    }
    case PacketKind::DirtyPageWB: {
      // Decompression happens before the DRAM write; the value itself was
      // applied at packet creation.
      Tick decomp = params_.codec == CodecId::None
                        ? 0
                        : Tick(latency_cycles(params_.codec, CodecDirection::Decompress)) *
                              params_.cycle_ticks;
      eq_.schedule_in(decomp, kMemTargetBase + 3 * params_.id, 4, [this] {
        SlotStation::Job job;
        job.page_class = true;
        job.run = [this](Tick start) {
          Tick busy = line_bus_ + page_bus_;
          bus_busy_ticks += busy;
          ++served_writebacks;
          maybe_drain_staged();
          return start + busy;
        };
        push_bus_job(std::move(job));
      });
      break;
    }
    default:
      throw std::logic_error("memory engine received a reply packet");
  }
}

}  // namespace dgsim
