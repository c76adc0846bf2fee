#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dgsim/rng.hpp"

namespace dgsim {

constexpr std::uint32_t kLineBytes = 64;
constexpr std::uint32_t kPageBytes = 4096;
constexpr std::uint32_t kLinesPerPage = kPageBytes / kLineBytes;

using PageImage = std::array<std::uint8_t, kPageBytes>;

inline std::uint64_t line_of(std::uint64_t address) { return address >> 6; }
inline std::uint64_t page_of(std::uint64_t address) { return address >> 12; }
inline std::uint32_t line_offset_of(std::uint64_t address) {
  return static_cast<std::uint32_t>((address >> 6) & (kLinesPerPage - 1));
}

enum class Op : std::uint8_t { Read, Write };

// One LLC miss: `gap` compute cycles since the previous record, then a
// read or write of a byte-granular virtual address.
struct TraceRecord {
  std::uint32_t gap = 0;
  Op op = Op::Read;
  std::uint64_t address = 0;

  bool operator==(const TraceRecord&) const = default;
};

enum class LocalityClass : std::uint8_t { Poor, Medium, High };

const char* to_string(LocalityClass c);
LocalityClass locality_from_string(const std::string& s);

struct WorkloadConfig {
  std::uint64_t working_set_pages = 1024;
  LocalityClass locality = LocalityClass::High;
  // Distinct lines touched per page visit; defaulted from `locality` when
  // left at 0 (Poor 1-4, Medium 8-24, High 40-64).
  std::uint32_t lines_per_visit_min = 0;
  std::uint32_t lines_per_visit_max = 0;
  double write_fraction = 0.2;
  // Two-level reuse model: a hot subset of pages is revisited with
  // geometric inter-arrival, the rest of the working set is swept
  // sequentially.
  double hot_page_fraction = 0.15;
  double hot_visit_probability = 0.6;
  double compressibility = 0.5;
  std::uint64_t record_count = 50000;
  std::uint32_t mean_gap_cycles = 12;
  std::uint64_t seed = 1;

  void validate() const;
  void resolve_lines_per_visit(std::uint32_t& lo, std::uint32_t& hi) const;
};

// Streaming generator; a pure function of (config, seed).
class TraceGenerator {
 public:
  explicit TraceGenerator(const WorkloadConfig& config);

  bool next(TraceRecord& out);
  std::uint64_t emitted() const { return emitted_; }

 private:
  void begin_visit();

  WorkloadConfig cfg_;
  Rng rng_;
  std::uint64_t emitted_ = 0;
  std::uint64_t sweep_page_ = 0;
  std::uint64_t hot_pages_ = 0;
  std::uint64_t visit_page_ = 0;
  std::vector<std::uint32_t> visit_lines_;
  std::size_t visit_pos_ = 0;
  std::uint32_t lines_lo_ = 1, lines_hi_ = 4;
};

std::vector<TraceRecord> generate_trace(const WorkloadConfig& config);

// Text format: `<gap-decimal>,<R|W>,<0x-hex-address>`, one record per line,
// `#` starts a comment line.
std::vector<TraceRecord> parse_trace(std::istream& in, const std::string& name = "<stream>");
std::vector<TraceRecord> parse_trace_file(const std::string& path);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_trace_file(const std::string& path, const std::vector<TraceRecord>& trace);

// Deterministic page contents with a controllable compressibility knob:
// 0 -> pseudorandom bytes, 1 -> all zeros, in between a blend of zero runs
// and a repeated per-page value against random filler.
PageImage synthesize_page_content(std::uint64_t page_id, double compressibility,
                                  std::uint64_t seed);

// Ground-truth content mapping for a whole run; multi-workload runs give
// each core's page range its own compressibility.
struct ContentModel {
  std::uint64_t seed = 1;
  // (first page beyond the region, compressibility), ascending
  std::vector<std::pair<std::uint64_t, double>> regions{{UINT64_MAX, 0.5}};

  double compressibility_of(std::uint64_t page) const {
    for (const auto& [end, c] : regions)
      if (page < end) return c;
    return regions.back().second;
  }
  PageImage synthesize(std::uint64_t page) const {
    return synthesize_page_content(page, compressibility_of(page), seed);
  }
};

// 64 bytes a core write stores into a line; shared with the replay oracle.
std::array<std::uint8_t, kLineBytes> write_value(std::uint32_t core_id, std::uint64_t trace_index,
                                                 std::uint64_t address);

struct LocalityProfile {
  double mean_lines_per_visit = 0.0;
  double write_fraction = 0.0;
  std::uint64_t visits = 0;
  std::uint64_t pages = 0;
  // reuse_distance_histogram[d] = revisits that saw d distinct other pages
  // since the previous visit; the overflow bucket is the last entry.
  std::vector<std::uint64_t> reuse_distance_histogram;
};

LocalityProfile locality_profile(const std::vector<TraceRecord>& trace);

}  // namespace dgsim
