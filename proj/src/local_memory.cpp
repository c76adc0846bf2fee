#include "dgsim/local_memory.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace dgsim {

LocalMemory::LocalMemory(std::uint64_t capacity_pages, ReplacementPolicy policy,
                         std::uint64_t bus_bandwidth_bytes_per_s, Tick processing_latency)
    : capacity_pages_(capacity_pages),
      policy_(policy),
      processing_latency_(processing_latency),
      bus_bandwidth_(bus_bandwidth_bytes_per_s),
      line_bus_ticks_(serialization_ticks(kLineBytes, bus_bandwidth_bytes_per_s)),
      page_bus_ticks_(serialization_ticks(kPageBytes, bus_bandwidth_bytes_per_s)) {}

LocalMemory::LookupResult LocalMemory::lookup(std::uint64_t page_id) {
  auto it = pages_.find(page_id);
  if (it == pages_.end()) return {false, lookup_miss_latency()};
  if (policy_ == ReplacementPolicy::ApproxLru) {
    order_.erase(it->second.order_it);
    it->second.order_it = order_.insert(order_.end(), page_id);
  }
  return {true, lookup_hit_latency()};
}

bool LocalMemory::dirty(std::uint64_t page_id) const {
  auto it = pages_.find(page_id);
  if (it == pages_.end()) throw std::invalid_argument("dirty(): page not resident");
  return it->second.dirty;
}

EvictedPage LocalMemory::evict_victim() {
  std::uint64_t victim = order_.front();
  order_.pop_front();
  auto it = pages_.find(victim);
  EvictedPage out{victim, it->second.dirty, it->second.bytes};
  pages_.erase(it);
  return out;
}

std::optional<EvictedPage> LocalMemory::install(std::uint64_t page_id, const PageImage& bytes,
                                                bool is_dirty) {
  if (pages_.count(page_id)) throw std::logic_error("install(): page already resident");
  if (capacity_pages_ == 0) return EvictedPage{page_id, is_dirty, bytes};
  std::optional<EvictedPage> evicted;
  if (pages_.size() >= capacity_pages_) evicted = evict_victim();
  Entry e;
  e.dirty = is_dirty;
  e.bytes = bytes;
  e.order_it = order_.insert(order_.end(), page_id);
  pages_.emplace(page_id, std::move(e));
  return evicted;
}

void LocalMemory::mark_dirty(std::uint64_t page_id) {
  auto it = pages_.find(page_id);
  if (it == pages_.end()) throw std::invalid_argument("mark_dirty(): page not resident");
  it->second.dirty = true;
}

std::vector<std::uint8_t> LocalMemory::read_line(std::uint64_t page_id,
                                                 std::uint32_t offset) const {
  if (offset >= kLinesPerPage) throw std::invalid_argument("read_line(): offset must be in 0..63");
  auto it = pages_.find(page_id);
  if (it == pages_.end()) throw std::invalid_argument("read_line(): page not resident");
  const std::uint8_t* p = it->second.bytes.data() + offset * kLineBytes;
  return std::vector<std::uint8_t>(p, p + kLineBytes);
}

void LocalMemory::write_line(std::uint64_t page_id, std::uint32_t offset,
                             const std::uint8_t* line64) {
  if (offset >= kLinesPerPage)
    throw std::invalid_argument("write_line(): offset must be in 0..63");
  auto it = pages_.find(page_id);
  if (it == pages_.end()) throw std::invalid_argument("write_line(): page not resident");
  std::memcpy(it->second.bytes.data() + offset * kLineBytes, line64, kLineBytes);
}

const PageImage& LocalMemory::page_bytes(std::uint64_t page_id) const {
  auto it = pages_.find(page_id);
  if (it == pages_.end()) throw std::invalid_argument("page_bytes(): page not resident");
  return it->second.bytes;
}

std::vector<std::uint64_t> LocalMemory::resident_pages() const {
  std::vector<std::uint64_t> out;
  out.reserve(pages_.size());
  for (const auto& kv : pages_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  return out;
}

LocalMemory::TimedLookup LocalMemory::timed_lookup(Tick now, std::uint64_t page_id) {
  Tick start = std::max(now, bus_busy_until_);
  bus_busy_until_ = start + line_bus_ticks_;
  LookupResult r = lookup(page_id);
  return {r.hit, start + r.latency};
}

Tick LocalMemory::timed_page_write(Tick now) {
  Tick start = std::max(now, bus_busy_until_);
  bus_busy_until_ = start + page_bus_ticks_;
  return start + processing_latency_ + page_bus_ticks_;
}

Tick LocalMemory::timed_page_read(Tick now) {
  Tick start = std::max(now, bus_busy_until_);
  bus_busy_until_ = start + page_bus_ticks_;
  return start + processing_latency_ + page_bus_ticks_;
}

Tick LocalMemory::timed_line_write(Tick now) {
  Tick start = std::max(now, bus_busy_until_);
  bus_busy_until_ = start + line_bus_ticks_;
  return start + processing_latency_ + line_bus_ticks_;
}

ReplacementPolicy policy_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "lru" || t == "approxlru" || t == "approx_lru") return ReplacementPolicy::ApproxLru;
  if (t == "fifo") return ReplacementPolicy::Fifo;
  throw std::invalid_argument("unknown replacement policy: " + s);
}

const char* to_string(ReplacementPolicy p) {
  return p == ReplacementPolicy::ApproxLru ? "lru" : "fifo";
}

}  // namespace dgsim
