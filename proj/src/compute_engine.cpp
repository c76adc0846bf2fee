#include "dgsim/compute_engine.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <ostream>
#include <stdexcept>

namespace dgsim {

namespace {
constexpr std::uint32_t kEngineTarget = 100;
constexpr std::uint32_t kEgressTarget = 110;

constexpr std::uint32_t kKindDecision = 1;
constexpr std::uint32_t kKindDeliver = 2;
constexpr std::uint32_t kKindComplete = 3;
constexpr std::uint32_t kKindDrain = 4;
constexpr std::uint32_t kKindInstall = 5;
constexpr std::uint32_t kKindWriteback = 6;
}  // namespace

ComputeEngine::ComputeEngine(EventQueue& eq, const ComputeEngineParams& params, LocalMemory* local,
                             std::vector<LinkModel*> links, std::vector<MemoryEngine*> memories,
                             CompleteCallback on_complete)
    : eq_(eq),
      params_(params),
      scheme_(params.scheme),
      local_(local),
      links_(std::move(links)),
      memories_(std::move(memories)),
      on_complete_(std::move(on_complete)),
      egress_(eq, kEgressTarget,
              scheme_.partitioned ? params.controller_policy : SlotPolicy::Fifo,
              scheme_.partitioned ? partition_lines_per_page(scheme_.partition_ratio) : 1,
              links_.empty() ? 0
                             : serialization_ticks(kLineBytes + kPacketHeaderBytes,
                                                   links_[0]->bandwidth()),
              params.sub_queue_capacity, params.page_queue_capacity) {
  if (links_.size() != memories_.size())
    throw std::invalid_argument("one link per memory component required");
}

void ComputeEngine::core_access(AccessRequest* req) {
  std::uint64_t page = page_of(req->address);
  if (!scheme_.local_memory) {
    // cache-line scheme: data goes straight to the LLC, local memory unused
    eq_.schedule(eq_.now(), kEngineTarget, kKindDecision, [this, req] { handle_miss(req); });
    return;
  }
  ++counters_.local_lookups;
  LocalMemory::TimedLookup lr = local_->timed_lookup(eq_.now(), page);
  if (lr.hit) {
    ++counters_.local_hits;
    complete(req, lr.done, CompletionPath::LocalHit);
    return;
  }
  if (!scheme_.line_path && !scheme_.page_path)
    throw std::logic_error("Local scheme missed in local memory; preload is incomplete");
  // The miss is known once the metadata access finishes; scheduling
  // decisions read buffer state at that time.
  eq_.schedule(lr.done, kEngineTarget, kKindDecision, [this, req] { handle_miss(req); });
}

void ComputeEngine::handle_miss(AccessRequest* req) {
  const std::uint64_t page = page_of(req->address);
  const std::uint32_t offset = line_offset_of(req->address);

  // The page may have installed between the metadata walk and this
  // decision; serve such races locally.
  if (scheme_.local_memory && local_->resident(page)) {
    ++counters_.local_hits;
    LocalMemory::TimedLookup lr = local_->timed_lookup(eq_.now(), page);
    complete(req, lr.done, CompletionPath::LocalHit);
    return;
  }
  req->went_remote = true;

  if (scheme_.page_free_zero_cost) {
    handle_miss_page_free(req, page);
    return;
  }

  auto it = page_entries_.find(page);
  PageEntry* pe = it == page_entries_.end() ? nullptr : &it->second;
  const bool had_page = pe != nullptr;

  // Page path: schedule the migration unless it is already pending or the
  // tracking structures are full. On full structures the selection unit
  // falls back to line-only movement; schemes without one (Remote, LC, BP,
  // CacheLinePlusPage) wait for space, since they move the page for every
  // miss by definition.
  if (scheme_.page_path && !had_page) {
    if (page_entries_.size() < params_.page_buffer_capacity && !egress_.page_full()) {
      schedule_page_request(page);
      pe = &page_entries_.at(page);
      req->initiated_packet = true;
    } else if (scheme_.selection_unit) {
      ++counters_.suppressed_page_requests;
    } else {
      stall(req);
      return;
    }
  }

  if (!scheme_.line_path) {
    if (pe) {
      pe->waiters.push_back(req);
    } else {
      stall(req);
    }
    return;
  }

  if (!had_page) {
    // Pre-request state had no page entry: the line is always scheduled,
    // so the first toucher can move both granularities.
    line_or_fallback(req, page, offset, pe);
    return;
  }
  if (!scheme_.selection_unit) {
    line_or_fallback(req, page, offset, pe);
    return;
  }
  // Sub-block utilization counts pending line requests (offset bits): with
  // high locality one page entry can hold dozens of pending lines, which is
  // what makes this side saturate first and throttle further lines.
  double sub_util = static_cast<double>(pending_line_offsets_) /
                    static_cast<double>(params_.sub_buffer_capacity);
  double page_util = static_cast<double>(page_entries_.size()) /
                     static_cast<double>(params_.page_buffer_capacity);
  if (pe->state == PageEntryState::Scheduled && sub_util < page_util) {
    line_or_fallback(req, page, offset, pe);
  } else {
    // The page is already on its way (or the sub-block path is saturated):
    // ride the page.
    pe->waiters.push_back(req);
    ++counters_.dropped_lines;
    if (pe->state != PageEntryState::Scheduled)
      ++counters_.dropped_lines_moved;
    else
      ++counters_.dropped_lines_util;
  }
}

void ComputeEngine::handle_miss_page_free(AccessRequest* req, std::uint64_t page) {
  std::uint32_t home = home_of(page);
  // One cache-line round trip; the page itself materializes for free.
  Tick line_service = 2 * params_.mem_processing_latency +
                      2 * serialization_ticks(kLineBytes, params_.mem_bus_bandwidth);
  Tick rtt = links_[home]->up().transfer_time(eq_.now(), kPacketHeaderBytes) + line_service +
             links_[home]->down().transfer_time(eq_.now(), kLineBytes + kPacketHeaderBytes);
  req->initiated_packet = true;
  complete(req, eq_.now() + rtt, CompletionPath::LineServed);
  if (!local_->resident(page)) {
    auto evicted = local_->install(page, memories_[home]->backing_page(page), false);
    if (evicted && evicted->dirty) {
      memories_[home_of(evicted->page_id)]->apply_page_write(evicted->page_id, evicted->bytes);
    }
  }
}

void ComputeEngine::schedule_page_request(std::uint64_t page) {
  page_entries_.emplace(page, PageEntry{});
  issue_page_request_job(page);
}

void ComputeEngine::issue_page_request_job(std::uint64_t page) {
  Packet pkt;
  pkt.kind = PacketKind::PageRequest;
  pkt.page_id = page;
  pkt.payload_bytes = kPacketHeaderBytes;
  pkt.src = 0;
  pkt.dst = home_of(page);
  pkt.tag = next_tag_++;
  SlotStation::Job job;
  job.page_class = true;
  job.run = [this, pkt](Tick start) {
    ++counters_.issued_pages;
    counters_.page_slot_bytes += kPageBytes;
    bytes_up_by_kind_[static_cast<int>(pkt.kind)] += pkt.payload_bytes;
    LinkModel* link = links_[pkt.dst];
    Tick arrival = link->up().send(start, pkt.payload_bytes);
    MemoryEngine* mem = memories_[pkt.dst];
    eq_.schedule(arrival, kEngineTarget, kKindDeliver, [mem, pkt] { mem->on_packet(pkt); });
    maybe_schedule_drain();
    return link->up().busy_until();
  };
  egress_.push(std::move(job));
}

void ComputeEngine::line_or_fallback(AccessRequest* req, std::uint64_t page, std::uint32_t offset,
                                     PageEntry* pe) {
  auto it = sub_entries_.find(page);
  SubEntry* se = it == sub_entries_.end() ? nullptr : &it->second;
  if (se && (se->offset_mask >> offset) & 1) {
    // line already inflight: one packet, several waiters
    se->waiters[offset].push_back(req);
    return;
  }
  bool need_entry = se == nullptr;
  if ((need_entry && sub_entries_.size() >= params_.sub_buffer_capacity) || egress_.line_full()) {
    if (pe) {
      pe->waiters.push_back(req);
      ++counters_.dropped_lines;
    } else {
      stall(req);
    }
    return;
  }
  if (need_entry) se = &sub_entries_.emplace(page, SubEntry{}).first->second;
  se->offset_mask |= std::uint64_t(1) << offset;
  ++pending_line_offsets_;
  se->waiters[offset].push_back(req);
  req->initiated_packet = true;

  Packet pkt;
  pkt.kind = PacketKind::LineRequest;
  pkt.page_id = page;
  pkt.line_offset = offset;
  pkt.payload_bytes = kPacketHeaderBytes;
  pkt.src = 0;
  pkt.dst = home_of(page);
  pkt.tag = next_tag_++;
  SlotStation::Job job;
  job.page_class = false;
  job.run = [this, pkt](Tick start) {
    ++counters_.issued_lines;
    counters_.line_slot_bytes += kLineBytes;
    bytes_up_by_kind_[static_cast<int>(pkt.kind)] += pkt.payload_bytes;
    LinkModel* link = links_[pkt.dst];
    Tick arrival = link->up().send(start, pkt.payload_bytes);
    MemoryEngine* mem = memories_[pkt.dst];
    eq_.schedule(arrival, kEngineTarget, kKindDeliver, [mem, pkt] { mem->on_packet(pkt); });
    maybe_schedule_drain();
    // a line slot reserves the reply-data serialization time on the link
    Tick slot_end = start + serialization_ticks(kLineBytes + kPacketHeaderBytes,
                                                link->bandwidth());
    return std::max(link->up().busy_until(), slot_end);
  };
  egress_.push(std::move(job));
}

void ComputeEngine::on_page_transfer_started(std::uint64_t page) {
  // The movement is now actually on the wire: the entry leaves the
  // "scheduled" state and late cache-line decisions ride the page.
  auto it = page_entries_.find(page);
  if (it != page_entries_.end() && it->second.state == PageEntryState::Scheduled)
    it->second.state = PageEntryState::Moved;
}

void ComputeEngine::deliver(Packet pkt) {
  switch (pkt.kind) {
    case PacketKind::LineData: {
      auto it = sub_entries_.find(pkt.page_id);
      if (it == sub_entries_.end() || !((it->second.offset_mask >> pkt.line_offset) & 1)) {
        // its page arrived first and cleared the entry
        ++counters_.discarded_line_data;
        return;
      }
      SubEntry& se = it->second;
      Tick now = eq_.now();
      for (AccessRequest* req : se.waiters[pkt.line_offset])
        complete(req, now, CompletionPath::LineServed);
      se.waiters.erase(pkt.line_offset);
      se.offset_mask &= ~(std::uint64_t(1) << pkt.line_offset);
      --pending_line_offsets_;
      if (se.offset_mask == 0) sub_entries_.erase(it);
      maybe_schedule_drain();
      return;
    }
    case PacketKind::PageData: {
      auto it = page_entries_.find(pkt.page_id);
      if (it == page_entries_.end())
        throw std::logic_error("PageData arrival without an inflight page entry");
      PageEntry& entry = it->second;
      if (entry.state == PageEntryState::Throttled) {
        // stale data: drop it and fetch the up-to-date page
        ++counters_.discarded_page_arrivals;
        ++counters_.rerequested_pages;
        entry.state = PageEntryState::Scheduled;
        if (!egress_.page_full()) {
          issue_page_request_job(pkt.page_id);
        } else {
          pending_rerequests_.push_back(pkt.page_id);
        }
        return;
      }
      Tick ready = eq_.now();
      if (scheme_.codec != CodecId::None) {
        ready += Tick(latency_cycles(scheme_.codec, CodecDirection::Decompress)) *
                 params_.cycle_ticks;
      }
      eq_.schedule(ready, kEngineTarget, kKindInstall,
                   [this, pkt = std::move(pkt)]() mutable { install_page(pkt); });
      return;
    }
    default:
      throw std::logic_error("compute engine received a request packet");
  }
}

void ComputeEngine::install_page(Packet& pkt) {
  auto it = page_entries_.find(pkt.page_id);
  if (it == page_entries_.end())
    throw std::logic_error("page install without an inflight page entry");
  PageEntry& entry = it->second;
  if (entry.state == PageEntryState::Throttled) {
    // throttled while decompressing
    ++counters_.discarded_page_arrivals;
    ++counters_.rerequested_pages;
    entry.state = PageEntryState::Scheduled;
    if (!egress_.page_full()) {
      issue_page_request_job(pkt.page_id);
    } else {
      pending_rerequests_.push_back(pkt.page_id);
    }
    return;
  }

  PageImage image;
  if (pkt.data.size() != kPageBytes)
    throw std::logic_error("PageData payload is not a full page image");
  std::memcpy(image.data(), pkt.data.data(), kPageBytes);

  // Buffered dirty lines overwrite the (possibly stale) inflight copy.
  bool dirty = entry.dirty_mask != 0;
  std::uint64_t mask = entry.dirty_mask;
  while (mask) {
    std::uint32_t off = static_cast<std::uint32_t>(std::countr_zero(mask));
    mask &= mask - 1;
    auto db = dirty_buffer_.find(pkt.page_id * kLinesPerPage + off);
    std::memcpy(image.data() + off * kLineBytes, db->second.data(), kLineBytes);
    dirty_buffer_.erase(db);
  }
  entry.dirty_mask = 0;

  Tick now = eq_.now();
  auto evicted = local_->install(pkt.page_id, image, dirty);
  Tick wb_ready = now;
  if (evicted && evicted->dirty) wb_ready = local_->timed_page_read(now);
  Tick done = local_->timed_page_write(now);
  if (evicted && evicted->dirty) emit_dirty_page_wb(std::move(*evicted), wb_ready);

  for (AccessRequest* req : entry.waiters) complete(req, done, CompletionPath::InstallServed);
  ++counters_.installed_pages;
  if (entry.was_throttled) ++counters_.recovered_pages;

  // Pending line requests for this page become moot: late line packets are
  // discarded from here on.
  auto se = sub_entries_.find(pkt.page_id);
  if (se != sub_entries_.end()) {
    std::uint64_t m = se->second.offset_mask;
    pending_line_offsets_ -= static_cast<std::uint64_t>(std::popcount(m));
    while (m) {
      std::uint32_t off = static_cast<std::uint32_t>(std::countr_zero(m));
      m &= m - 1;
      for (AccessRequest* req : se->second.waiters[off])
        complete(req, done, CompletionPath::InstallServed);
    }
    sub_entries_.erase(se);
  }
  page_entries_.erase(it);
  maybe_schedule_drain();
}

void ComputeEngine::dirty_eviction(std::uint64_t address,
                                   const std::array<std::uint8_t, kLineBytes>& value) {
  std::uint64_t page = page_of(address);
  std::uint32_t offset = line_offset_of(address);
  if (scheme_.local_memory && local_->resident(page)) {
    local_->timed_line_write(eq_.now());
    local_->write_line(page, offset, value.data());
    local_->mark_dirty(page);
    return;
  }
  if (scheme_.page_free_zero_cost) {
    memories_[home_of(page)]->apply_line_write(address, value.data());
    return;
  }
  auto it = scheme_.page_path ? page_entries_.find(page) : page_entries_.end();
  if (it == page_entries_.end()) {
    emit_dirty_line_wb(address, value);
    return;
  }
  PageEntry& entry = it->second;
  std::uint64_t bit = std::uint64_t(1) << offset;
  if (entry.dirty_mask & bit) {
    dirty_buffer_[page * kLinesPerPage + offset] = value;  // refresh in place
    return;
  }
  std::uint32_t count = static_cast<std::uint32_t>(std::popcount(entry.dirty_mask)) + 1;
  if (count <= params_.dirty_threshold && dirty_buffer_.size() < params_.dirty_buffer_capacity) {
    dirty_buffer_[page * kLinesPerPage + offset] = value;
    entry.dirty_mask |= bit;
    ++counters_.dirty_lines_buffered;
    return;
  }
  // Too many dirty lines for one inflight page (or no buffer space): flush
  // them all and invalidate the inflight copy.
  flush_and_throttle(page, entry, address, value);
}

void ComputeEngine::flush_and_throttle(std::uint64_t page, PageEntry& entry,
                                       std::uint64_t address,
                                       const std::array<std::uint8_t, kLineBytes>& value) {
  std::uint64_t mask = entry.dirty_mask;
  while (mask) {
    std::uint32_t off = static_cast<std::uint32_t>(std::countr_zero(mask));
    mask &= mask - 1;
    auto db = dirty_buffer_.find(page * kLinesPerPage + off);
    emit_dirty_line_wb(page * kPageBytes + std::uint64_t(off) * kLineBytes, db->second);
    dirty_buffer_.erase(db);
  }
  emit_dirty_line_wb(address, value);
  entry.dirty_mask = 0;
  entry.state = PageEntryState::Throttled;
  entry.was_throttled = true;
  ++counters_.throttled_pages;
  ++counters_.dirty_buffer_flushes;
}

void ComputeEngine::emit_dirty_line_wb(std::uint64_t address,
                                       const std::array<std::uint8_t, kLineBytes>& value) {
  std::uint64_t page = page_of(address);
  memories_[home_of(page)]->apply_line_write(address, value.data());
  Packet pkt;
  pkt.kind = PacketKind::DirtyLineWB;
  pkt.page_id = page;
  pkt.line_offset = line_offset_of(address);
  pkt.payload_bytes = kLineBytes + kPacketHeaderBytes;
  pkt.src = 0;
  pkt.dst = home_of(page);
  pkt.tag = next_tag_++;
  ++counters_.dirty_line_wbs;
  if (!egress_.line_full()) {
    send_packet_job(std::move(pkt), false);
  } else {
    pending_wbs_.push_back(std::move(pkt));
  }
}

void ComputeEngine::emit_dirty_page_wb(EvictedPage victim, Tick ready_at) {
  std::uint32_t home = home_of(victim.page_id);
  memories_[home]->apply_page_write(victim.page_id, victim.bytes);
  Packet pkt;
  pkt.kind = PacketKind::DirtyPageWB;
  pkt.page_id = victim.page_id;
  pkt.src = 0;
  pkt.dst = home;
  pkt.tag = next_tag_++;
  Tick ready = ready_at;
  if (scheme_.codec != CodecId::None) {
    CompressedPage cp = compress_page(scheme_.codec, victim.bytes);
    pkt.payload_bytes = cp.compressed_size() + kPacketHeaderBytes;
    ready += Tick(latency_cycles(scheme_.codec, CodecDirection::Compress)) * params_.cycle_ticks;
  } else {
    pkt.payload_bytes = kPageBytes + kPacketHeaderBytes;
  }
  ++counters_.dirty_page_wbs;
  eq_.schedule(ready, kEngineTarget, kKindWriteback, [this, pkt = std::move(pkt)]() mutable {
    if (!egress_.page_full()) {
      send_packet_job(std::move(pkt), true);
    } else {
      pending_wbs_.push_back(std::move(pkt));
    }
  });
}

void ComputeEngine::send_packet_job(Packet pkt, bool page_class) {
  SlotStation::Job job;
  job.page_class = page_class;
  job.run = [this, pkt = std::move(pkt)](Tick start) {
    if (pkt.kind == PacketKind::DirtyLineWB) counters_.line_slot_bytes += kLineBytes;
    if (pkt.kind == PacketKind::DirtyPageWB) counters_.page_slot_bytes += kPageBytes;
    bytes_up_by_kind_[static_cast<int>(pkt.kind)] += pkt.payload_bytes;
    LinkModel* link = links_[pkt.dst];
    Tick arrival = link->up().send(start, pkt.payload_bytes);
    MemoryEngine* mem = memories_[pkt.dst];
    eq_.schedule(arrival, kEngineTarget, kKindDeliver, [mem, pkt] { mem->on_packet(pkt); });
    maybe_schedule_drain();
    return link->up().busy_until();
  };
  egress_.push(std::move(job));
}

void ComputeEngine::complete(AccessRequest* req, Tick at, CompletionPath path) {
  eq_.schedule(at, kEngineTarget, kKindComplete, [this, req, path] {
    if (req->completed) throw std::logic_error("request completed twice");
    req->completed = true;
    req->completion_time = eq_.now();
    ++counters_.completions;
    switch (path) {
      case CompletionPath::LocalHit:
        break;  // hit counters were bumped at the lookup
      case CompletionPath::LineServed:
        remote_latencies_.push_back(eq_.now() - req->issue_time);
        break;
      case CompletionPath::InstallServed:
        // served out of local memory by the arriving page: an inflight hit,
        // unless this request is what put the migration on the wire
        if (req->initiated_packet) {
          remote_latencies_.push_back(eq_.now() - req->issue_time);
        } else {
          ++counters_.local_hits;
        }
        break;
    }
    on_complete_(req);
  });
}

void ComputeEngine::stall(AccessRequest* req) {
  pending_stalled_.push_back(req);
  ++counters_.stalled_requests;
}

void ComputeEngine::maybe_schedule_drain() {
  if (drain_scheduled_) return;
  if (pending_stalled_.empty() && pending_wbs_.empty() && pending_rerequests_.empty()) return;
  drain_scheduled_ = true;
  eq_.schedule(eq_.now(), kEngineTarget, kKindDrain, [this] { drain_pending(); });
}

void ComputeEngine::drain_pending() {
  drain_scheduled_ = false;
  // Writeback obligations first, then deferred re-requests, then stalled
  // core requests (which re-run the full decision).
  while (!pending_wbs_.empty()) {
    bool page_class = pending_wbs_.front().kind == PacketKind::DirtyPageWB;
    if (page_class ? egress_.page_full() : egress_.line_full()) break;
    Packet pkt = std::move(pending_wbs_.front());
    pending_wbs_.pop_front();
    send_packet_job(std::move(pkt), page_class);
  }
  while (!pending_rerequests_.empty() && !egress_.page_full()) {
    std::uint64_t page = pending_rerequests_.front();
    pending_rerequests_.pop_front();
    issue_page_request_job(page);
  }
  std::deque<AccessRequest*> retry;
  retry.swap(pending_stalled_);
  while (!retry.empty()) {
    AccessRequest* req = retry.front();
    retry.pop_front();
    --counters_.stalled_requests;
    // the page may have been installed while the request waited for space
    std::uint64_t page = page_of(req->address);
    if (scheme_.local_memory && local_->resident(page)) {
      ++counters_.local_hits;
      req->went_remote = false;
      LocalMemory::TimedLookup lr = local_->timed_lookup(eq_.now(), page);
      complete(req, lr.done, CompletionPath::LocalHit);
      continue;
    }
    handle_miss(req);
  }
}

void ComputeEngine::overlay_dirty_buffer(
    std::unordered_map<std::uint64_t, PageImage>& image) const {
  for (const auto& [key, value] : dirty_buffer_) {
    std::uint64_t page = key / kLinesPerPage;
    std::uint32_t off = static_cast<std::uint32_t>(key % kLinesPerPage);
    auto it = image.find(page);
    if (it == image.end()) continue;
    std::memcpy(it->second.data() + off * kLineBytes, value.data(), kLineBytes);
  }
}

void ComputeEngine::dump_counters(std::ostream& os) const {
  os << "issued_lines " << counters_.issued_lines << "\n"
     << "issued_pages " << counters_.issued_pages << "\n"
     << "dropped_lines " << counters_.dropped_lines << "\n"
     << "throttled_pages " << counters_.throttled_pages << "\n"
     << "dirty_flushes " << counters_.dirty_buffer_flushes << "\n";
}

}  // namespace dgsim
