#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dgsim/compression.hpp"

namespace dgsim {

enum class SchemeName : std::uint8_t {
  Local,
  CacheLine,
  Remote,
  PageFree,
  CacheLinePlusPage,
  LC,
  BP,
  PQ,
  DaeMon,
};

const char* to_string(SchemeName name);
SchemeName scheme_from_string(const std::string& s);  // case-insensitive

// The policy bundle one evaluated data-movement scheme boils down to.
struct SchemeConfig {
  SchemeName name = SchemeName::Remote;
  bool line_path = false;
  bool page_path = true;
  bool partitioned = false;           // two queues + slot pattern vs shared FIFO
  double partition_ratio = 0.25;      // meaningful when partitioned
  bool selection_unit = false;
  CodecId codec = CodecId::None;
  bool local_memory = true;
  bool page_free_zero_cost = false;   // pages install instantly, no link traffic
  bool local_full_working_set = false;
};

struct SchemeOverrides {
  std::optional<double> partition_ratio;
  std::optional<CodecId> codec;
};

// Validates override consistency (a ratio requires partitioned paths, a
// codec on Remote is LC in disguise, ...).
SchemeConfig build_scheme(SchemeName name, const SchemeOverrides& overrides = {});
SchemeConfig build_scheme(const std::string& name, const SchemeOverrides& overrides = {});

// K = floor((page/line) * r / (1-r)): line slots per page slot at ratio r.
std::uint32_t partition_lines_per_page(double ratio, std::uint32_t page_bytes = 4096,
                                       std::uint32_t line_bytes = 64);

}  // namespace dgsim
