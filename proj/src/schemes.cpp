#include "dgsim/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace dgsim {

const char* to_string(SchemeName name) {
  switch (name) {
    case SchemeName::Local: return "Local";
    case SchemeName::CacheLine: return "CacheLine";
    case SchemeName::Remote: return "Remote";
    case SchemeName::PageFree: return "PageFree";
    case SchemeName::CacheLinePlusPage: return "CacheLinePlusPage";
    case SchemeName::LC: return "LC";
    case SchemeName::BP: return "BP";
    case SchemeName::PQ: return "PQ";
    case SchemeName::DaeMon: return "DaeMon";
  }
  return "?";
}

SchemeName scheme_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "local") return SchemeName::Local;
  if (t == "cacheline" || t == "cache-line" || t == "cache_line") return SchemeName::CacheLine;
  if (t == "remote") return SchemeName::Remote;
  if (t == "pagefree" || t == "page-free" || t == "page_free") return SchemeName::PageFree;
  if (t == "cachelinepluspage" || t == "cache-line+page" || t == "cacheline+page")
    return SchemeName::CacheLinePlusPage;
  if (t == "lc") return SchemeName::LC;
  if (t == "bp") return SchemeName::BP;
  if (t == "pq") return SchemeName::PQ;
  if (t == "daemon") return SchemeName::DaeMon;
  throw std::invalid_argument("unknown scheme: " + s);
}

std::uint32_t partition_lines_per_page(double ratio, std::uint32_t page_bytes,
                                       std::uint32_t line_bytes) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument(
        "partition ratio must be in (0,1); single-granularity paths are scheme flags");
  double k = (static_cast<double>(page_bytes) / line_bytes) * (ratio / (1.0 - ratio));
  return static_cast<std::uint32_t>(std::floor(k + 1e-9));
}

SchemeConfig build_scheme(SchemeName name, const SchemeOverrides& overrides) {
  SchemeConfig c;
  c.name = name;
  switch (name) {
    case SchemeName::Local:
      c.line_path = false;
      c.page_path = false;
      c.local_memory = true;
      c.local_full_working_set = true;
      break;
    case SchemeName::CacheLine:
      c.line_path = true;
      c.page_path = false;
      c.local_memory = false;
      break;
    case SchemeName::Remote:
      c.line_path = false;
      c.page_path = true;
      break;
    case SchemeName::PageFree:
      c.line_path = false;
      c.page_path = true;
      c.page_free_zero_cost = true;
      break;
    case SchemeName::CacheLinePlusPage:
      c.line_path = true;
      c.page_path = true;
      c.partitioned = false;  // one shared FIFO, first arrival serves
      break;
    case SchemeName::LC:
      c.line_path = false;
      c.page_path = true;
      c.codec = CodecId::Lz;
      break;
    case SchemeName::BP:
      c.line_path = true;
      c.page_path = true;
      c.partitioned = true;
      break;
    case SchemeName::PQ:
      c.line_path = true;
      c.page_path = true;
      c.partitioned = true;
      c.selection_unit = true;
      break;
    case SchemeName::DaeMon:
      c.line_path = true;
      c.page_path = true;
      c.partitioned = true;
      c.selection_unit = true;
      c.codec = CodecId::Lz;
      break;
  }

  if (overrides.partition_ratio) {
    if (!c.partitioned)
      throw std::invalid_argument(std::string("partition_ratio is only valid for partitioned "
                                              "schemes (BP, PQ, DaeMon), not ") +
                                  to_string(name));
    c.partition_ratio = *overrides.partition_ratio;
  }
  if (overrides.codec) {
    // A codec override on Remote is the LC scheme in disguise; a codec on a
    // line-only scheme never compresses anything. Guard the aliases.
    bool allowed = (name == SchemeName::LC || name == SchemeName::DaeMon);
    if (!allowed)
      throw std::invalid_argument(std::string("codec override not valid for scheme ") +
                                  to_string(name));
    if (*overrides.codec == CodecId::None)
      throw std::invalid_argument("codec override cannot be 'none' (that names another scheme)");
    c.codec = *overrides.codec;
  }
  // Validate the frozen ratio too (overridable sweep values pass through here).
  if (c.partitioned) partition_lines_per_page(c.partition_ratio);
  return c;
}

SchemeConfig build_scheme(const std::string& name, const SchemeOverrides& overrides) {
  return build_scheme(scheme_from_string(name), overrides);
}

}  // namespace dgsim
