#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dgsim/time.hpp"
#include "dgsim/workload.hpp"

namespace dgsim {

enum class ReplacementPolicy : std::uint8_t { ApproxLru, Fifo };

struct EvictedPage {
  std::uint64_t page_id = 0;
  bool dirty = false;
  PageImage bytes{};
};

// Page-granularity inclusive cache of remote memory. Replacement is exact
// LRU (standing in for the approximate policy) or FIFO. Timing: metadata is
// one 64 B memory access; a hit adds one processing latency for the data
// array. The bus serializes one access at a time.
class LocalMemory {
 public:
  LocalMemory(std::uint64_t capacity_pages, ReplacementPolicy policy,
              std::uint64_t bus_bandwidth_bytes_per_s = 17ULL * 1000 * 1000 * 1000,
              Tick processing_latency = ns_to_ticks(15));

  struct LookupResult {
    bool hit = false;
    Tick latency = 0;
  };

  // Updates recency on hit.
  LookupResult lookup(std::uint64_t page_id);

  bool resident(std::uint64_t page_id) const { return pages_.count(page_id) != 0; }
  bool dirty(std::uint64_t page_id) const;

  // Pre: page absent. At capacity the policy victim is returned; the caller
  // owns writing dirty victims back to remote memory. With zero capacity
  // the installed page itself bounces straight back out.
  std::optional<EvictedPage> install(std::uint64_t page_id, const PageImage& bytes, bool is_dirty);

  void mark_dirty(std::uint64_t page_id);
  std::vector<std::uint8_t> read_line(std::uint64_t page_id, std::uint32_t offset) const;
  void write_line(std::uint64_t page_id, std::uint32_t offset, const std::uint8_t* line64);
  const PageImage& page_bytes(std::uint64_t page_id) const;

  std::uint64_t size() const { return pages_.size(); }
  std::uint64_t capacity() const { return capacity_pages_; }
  std::vector<std::uint64_t> resident_pages() const;

  // Timed accesses: bus occupancy serializes, processing pipelines.
  struct TimedLookup {
    bool hit = false;
    Tick done = 0;
  };
  TimedLookup timed_lookup(Tick now, std::uint64_t page_id);
  Tick timed_page_write(Tick now);  // 4 KB install
  Tick timed_page_read(Tick now);   // 4 KB victim readout
  Tick timed_line_write(Tick now);  // 64 B dirty flush into a resident page

  Tick lookup_hit_latency() const { return 2 * processing_latency_ + line_bus_ticks_; }
  Tick lookup_miss_latency() const { return processing_latency_ + line_bus_ticks_; }

 private:
  struct Entry {
    bool dirty = false;
    PageImage bytes{};
    std::list<std::uint64_t>::iterator order_it;
  };

  EvictedPage evict_victim();

  std::uint64_t capacity_pages_;
  ReplacementPolicy policy_;
  Tick processing_latency_;
  std::uint64_t bus_bandwidth_;
  Tick line_bus_ticks_;
  Tick page_bus_ticks_;
  Tick bus_busy_until_ = 0;

  std::unordered_map<std::uint64_t, Entry> pages_;
  std::list<std::uint64_t> order_;  // front = next victim
};

ReplacementPolicy policy_from_string(const std::string& s);
const char* to_string(ReplacementPolicy p);

}  // namespace dgsim
