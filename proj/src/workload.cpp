#include "dgsim/workload.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dgsim {

const char* to_string(LocalityClass c) {
  switch (c) {
    case LocalityClass::Poor: return "poor";
    case LocalityClass::Medium: return "medium";
    case LocalityClass::High: return "high";
  }
  return "?";
}

LocalityClass locality_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "poor") return LocalityClass::Poor;
  if (t == "medium") return LocalityClass::Medium;
  if (t == "high") return LocalityClass::High;
  throw std::invalid_argument("unknown locality class: " + s);
}

void WorkloadConfig::validate() const {
  if (working_set_pages < 1) throw std::invalid_argument("working_set_pages must be >= 1");
  if (write_fraction < 0.0 || write_fraction > 1.0)
    throw std::invalid_argument("write_fraction must be in [0,1]");
  if (compressibility < 0.0 || compressibility > 1.0)
    throw std::invalid_argument("compressibility must be in [0,1]");
  if (lines_per_visit_min > lines_per_visit_max)
    throw std::invalid_argument("lines_per_visit_min > lines_per_visit_max");
  if (lines_per_visit_max > kLinesPerPage)
    throw std::invalid_argument("lines_per_visit_max > 64");
}

void WorkloadConfig::resolve_lines_per_visit(std::uint32_t& lo, std::uint32_t& hi) const {
  if (lines_per_visit_max != 0) {
    lo = std::max(1u, lines_per_visit_min);
    hi = lines_per_visit_max;
    return;
  }
  switch (locality) {
    case LocalityClass::Poor: lo = 1; hi = 4; break;
    case LocalityClass::Medium: lo = 8; hi = 24; break;
    case LocalityClass::High: lo = 40; hi = 64; break;
  }
}

TraceGenerator::TraceGenerator(const WorkloadConfig& config)
    : cfg_(config), rng_(derive_seed(config.seed, 1)) {
  cfg_.validate();
  cfg_.resolve_lines_per_visit(lines_lo_, lines_hi_);
  hot_pages_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(
                                              cfg_.working_set_pages * cfg_.hot_page_fraction));
  begin_visit();
}

void TraceGenerator::begin_visit() {
  if (cfg_.working_set_pages > hot_pages_ && rng_.chance(cfg_.hot_visit_probability)) {
    // Geometric-ish revisit pattern over the hot set: low indices favored.
    std::uint64_t a = rng_.below(hot_pages_);
    std::uint64_t b = rng_.below(hot_pages_);
    visit_page_ = std::min(a, b);
  } else {
    visit_page_ = hot_pages_ + sweep_page_;
    if (cfg_.working_set_pages > hot_pages_) {
      sweep_page_ = (sweep_page_ + 1) % (cfg_.working_set_pages - hot_pages_);
    } else {
      visit_page_ = sweep_page_ % cfg_.working_set_pages;
      sweep_page_++;
    }
  }
  std::uint32_t n =
      static_cast<std::uint32_t>(rng_.range(lines_lo_, std::max(lines_lo_, lines_hi_)));
  // Distinct line offsets for this visit: a sequential run from a random
  // start keeps intra-page order realistic.
  visit_lines_.clear();
  std::uint32_t start = static_cast<std::uint32_t>(rng_.below(kLinesPerPage));
  for (std::uint32_t i = 0; i < n; ++i) visit_lines_.push_back((start + i) % kLinesPerPage);
  visit_pos_ = 0;
}

bool TraceGenerator::next(TraceRecord& out) {
  if (emitted_ >= cfg_.record_count) return false;
  if (visit_pos_ >= visit_lines_.size()) begin_visit();
  out.gap = cfg_.mean_gap_cycles == 0
                ? 0
                : static_cast<std::uint32_t>(rng_.below(2 * cfg_.mean_gap_cycles + 1));
  out.op = rng_.chance(cfg_.write_fraction) ? Op::Write : Op::Read;
  out.address = visit_page_ * kPageBytes + std::uint64_t(visit_lines_[visit_pos_]) * kLineBytes;
  ++visit_pos_;
  ++emitted_;
  return true;
}

std::vector<TraceRecord> generate_trace(const WorkloadConfig& config) {
  TraceGenerator gen(config);
  std::vector<TraceRecord> out;
  out.reserve(config.record_count);
  TraceRecord rec;
  while (gen.next(rec)) out.push_back(rec);
  return out;
}

namespace {

bool parse_u64(const char* s, const char* end, int base, std::uint64_t& out) {
  if (s == end) return false;
  std::uint64_t v = 0;
  for (const char* p = s; p != end; ++p) {
    int d;
    char c = *p;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (base == 16 && c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return false;
    v = v * base + d;
  }
  out = v;
  return true;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in, const std::string& name) {
  std::vector<TraceRecord> out;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos || line[begin] == '#') continue;
    auto fail = [&](const char* what) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + what + ": " + line);
    };
    std::size_t c1 = line.find(',', begin);
    if (c1 == std::string::npos) fail("expected <gap>,<R|W>,<0xaddr>");
    std::size_t c2 = line.find(',', c1 + 1);
    if (c2 == std::string::npos) fail("expected <gap>,<R|W>,<0xaddr>");
    TraceRecord rec;
    std::uint64_t gap;
    if (!parse_u64(line.data() + begin, line.data() + c1, 10, gap) || gap > UINT32_MAX)
      fail("bad gap field");
    rec.gap = static_cast<std::uint32_t>(gap);
    std::string_view op(line.data() + c1 + 1, c2 - c1 - 1);
    if (op == "R" || op == "r") rec.op = Op::Read;
    else if (op == "W" || op == "w") rec.op = Op::Write;
    else fail("bad op field (want R or W)");
    std::size_t addr_begin = c2 + 1;
    std::size_t addr_end = line.find_last_not_of(" \t") + 1;
    if (addr_end <= addr_begin + 2 || line[addr_begin] != '0' ||
        (line[addr_begin + 1] != 'x' && line[addr_begin + 1] != 'X'))
      fail("bad address field (want 0x-hex)");
    if (!parse_u64(line.data() + addr_begin + 2, line.data() + addr_end, 16, rec.address))
      fail("bad address field (want 0x-hex)");
    out.push_back(rec);
  }
  return out;
}

std::vector<TraceRecord> parse_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return parse_trace(in, path);
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  char buf[64];
  for (const TraceRecord& r : trace) {
    int n = std::snprintf(buf, sizeof buf, "%u,%c,0x%llx\n", r.gap, r.op == Op::Read ? 'R' : 'W',
                          static_cast<unsigned long long>(r.address));
    out.write(buf, n);
  }
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  write_trace(out, trace);
}

PageImage synthesize_page_content(std::uint64_t page_id, double compressibility,
                                  std::uint64_t seed) {
  PageImage page;
  Rng rng(derive_seed(seed, splitmix64(page_id + 0x517cc1b727220a95ULL)));
  if (compressibility >= 1.0) {
    page.fill(0);
    return page;
  }
  std::uint64_t repeated = rng.next();
  for (std::uint32_t w = 0; w < kPageBytes / 8; ++w) {
    std::uint64_t word;
    if (compressibility > 0.0 && rng.unit() < compressibility) {
      word = (rng.next() & 1) ? 0 : repeated;
    } else {
      word = rng.next();
    }
    std::memcpy(page.data() + w * 8, &word, 8);
  }
  return page;
}

std::array<std::uint8_t, kLineBytes> write_value(std::uint32_t core_id, std::uint64_t trace_index,
                                                 std::uint64_t address) {
  std::array<std::uint8_t, kLineBytes> line;
  std::uint64_t s = splitmix64(splitmix64(address) ^ splitmix64(trace_index) ^
                               splitmix64(0xc0f0ULL + core_id));
  for (std::uint32_t w = 0; w < kLineBytes / 8; ++w) {
    s = splitmix64(s);
    std::memcpy(line.data() + w * 8, &s, 8);
  }
  return line;
}

LocalityProfile locality_profile(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw std::invalid_argument("locality_profile: empty trace");
  LocalityProfile p;
  constexpr std::size_t kHistBuckets = 65;  // last bucket = overflow
  p.reuse_distance_histogram.assign(kHistBuckets, 0);

  std::uint64_t writes = 0;
  std::uint64_t current_page = UINT64_MAX;
  std::set<std::uint64_t> visit_lines;
  std::uint64_t total_visit_lines = 0;

  // Reuse distance: distinct other pages seen since the previous visit,
  // tracked with an LRU stack over page ids.
  std::vector<std::uint64_t> stack;
  std::set<std::uint64_t> seen;

  auto close_visit = [&]() {
    if (current_page == UINT64_MAX) return;
    total_visit_lines += visit_lines.size();
    p.visits++;
    visit_lines.clear();
  };

  for (const TraceRecord& r : trace) {
    if (r.op == Op::Write) ++writes;
    std::uint64_t page = page_of(r.address);
    if (page != current_page) {
      close_visit();
      auto it = std::find(stack.begin(), stack.end(), page);
      if (it != stack.end()) {
        std::size_t depth = static_cast<std::size_t>(stack.end() - it) - 1;
        p.reuse_distance_histogram[std::min(depth, kHistBuckets - 1)]++;
        stack.erase(it);
      }
      stack.push_back(page);
      seen.insert(page);
      current_page = page;
    }
    visit_lines.insert(line_of(r.address));
  }
  close_visit();

  p.pages = seen.size();
  p.write_fraction = static_cast<double>(writes) / static_cast<double>(trace.size());
  p.mean_lines_per_visit =
      p.visits == 0 ? 0.0 : static_cast<double>(total_visit_lines) / static_cast<double>(p.visits);
  return p;
}

}  // namespace dgsim
