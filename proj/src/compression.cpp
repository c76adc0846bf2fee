#include "dgsim/compression.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace dgsim {

const char* to_string(CodecId id) {
  switch (id) {
    case CodecId::None: return "none";
    case CodecId::Lz: return "lz";
    case CodecId::FpcBdi: return "fpcbdi";
    case CodecId::Fve: return "fve";
  }
  return "?";
}

CodecId codec_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "none") return CodecId::None;
  if (t == "lz") return CodecId::Lz;
  if (t == "fpcbdi") return CodecId::FpcBdi;
  if (t == "fve") return CodecId::Fve;
  throw std::invalid_argument("unknown codec: " + s);
}

namespace {

// ---------------------------------------------------------------------------
// LZ77. Token stream per block:
//   0x01..0x7f            literal run of that many bytes, bytes follow
//   0x80 | (len-3)        match, len in 3..130; next byte is offset-1 (1..256)
// Decoding stops when 1024 output bytes have been produced. Overlapping
// matches copy byte by byte.
// ---------------------------------------------------------------------------

constexpr std::uint32_t kLzBlock = 1024;
constexpr std::uint32_t kLzWindow = 256;
constexpr std::uint32_t kLzMinMatch = 3;
constexpr std::uint32_t kLzMaxMatch = 130;
constexpr std::uint32_t kHashSize = 4096;

std::uint32_t lz_hash(const std::uint8_t* p) {
  std::uint32_t v = (std::uint32_t(p[0]) << 16) | (std::uint32_t(p[1]) << 8) | p[2];
  return (v * 2654435761u) >> 20;  // top 12 bits
}

void lz_compress_block(const std::uint8_t* in, std::vector<std::uint8_t>& out) {
  std::int16_t head[kHashSize];
  std::int16_t prev[kLzBlock];
  std::memset(head, -1, sizeof head);

  std::uint32_t lit_start = 0, lit_len = 0;
  auto flush_literals = [&](std::uint32_t upto) {
    while (lit_len > 0) {
      std::uint32_t n = std::min(lit_len, 127u);
      out.push_back(static_cast<std::uint8_t>(n));
      out.insert(out.end(), in + lit_start, in + lit_start + n);
      lit_start += n;
      lit_len -= n;
    }
    lit_start = upto;
  };

  std::uint32_t i = 0;
  while (i < kLzBlock) {
    std::uint32_t best_len = 0, best_off = 0;
    if (i + kLzMinMatch <= kLzBlock) {
      std::uint32_t limit = std::min(kLzMaxMatch, kLzBlock - i);
      std::int32_t cand = head[lz_hash(in + i)];
      while (cand >= 0 && i - static_cast<std::uint32_t>(cand) <= kLzWindow) {
        const std::uint8_t* a = in + cand;
        const std::uint8_t* b = in + i;
        std::uint32_t len = 0;
        while (len < limit && a[len] == b[len]) ++len;
        if (len > best_len) {
          best_len = len;
          best_off = i - static_cast<std::uint32_t>(cand);
          if (best_len >= limit) break;
        }
        cand = prev[cand];
      }
    }
    if (best_len >= kLzMinMatch) {
      flush_literals(i);
      out.push_back(static_cast<std::uint8_t>(0x80 | (best_len - kLzMinMatch)));
      out.push_back(static_cast<std::uint8_t>(best_off - 1));
      std::uint32_t end = i + best_len;
      for (; i < end; ++i) {
        if (i + kLzMinMatch <= kLzBlock) {
          std::uint32_t h = lz_hash(in + i);
          prev[i] = head[h];
          head[h] = static_cast<std::int16_t>(i);
        }
      }
      lit_start = i;
    } else {
      if (lit_len == 0) lit_start = i;
      ++lit_len;
      if (i + kLzMinMatch <= kLzBlock) {
        std::uint32_t h = lz_hash(in + i);
        prev[i] = head[h];
        head[h] = static_cast<std::int16_t>(i);
      }
      ++i;
    }
  }
  flush_literals(kLzBlock);
}

void lz_decompress_block(const std::uint8_t*& p, const std::uint8_t* end, std::uint8_t* out) {
  std::uint32_t pos = 0;
  while (pos < kLzBlock) {
    if (p >= end) throw std::runtime_error("lz: truncated block stream");
    std::uint8_t tok = *p++;
    if (tok & 0x80) {
      std::uint32_t len = (tok & 0x7f) + kLzMinMatch;
      if (p >= end) throw std::runtime_error("lz: truncated match token");
      std::uint32_t off = std::uint32_t(*p++) + 1;
      if (off > pos || pos + len > kLzBlock) throw std::runtime_error("lz: bad match");
      for (std::uint32_t k = 0; k < len; ++k, ++pos) out[pos] = out[pos - off];
    } else {
      std::uint32_t len = tok;
      if (len == 0 || pos + len > kLzBlock || p + len > end)
        throw std::runtime_error("lz: bad literal run");
      std::memcpy(out + pos, p, len);
      p += len;
      pos += len;
    }
  }
}

// ---------------------------------------------------------------------------
// FPC over 32-bit words: 3-bit prefix per pattern.
//   0 zero run (3-bit length, 1..8 words)   4 halfword padded with zeros (16b)
//   1 4-bit sign-extended                   5 two halfwords, each a byte (16b)
//   2 8-bit sign-extended                   6 repeated bytes (8b)
//   3 16-bit sign-extended                  7 uncompressed (32b)
// ---------------------------------------------------------------------------

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void put(std::uint64_t value, std::uint32_t bits) {
    for (std::uint32_t i = 0; i < bits; ++i) {
      std::uint32_t bit = (value >> (bits - 1 - i)) & 1;
      if (fill_ == 0) out_.push_back(0);
      out_.back() = static_cast<std::uint8_t>(out_.back() | (bit << (7 - fill_)));
      fill_ = (fill_ + 1) & 7;
    }
  }
  void align() { fill_ = 0; }

 private:
  std::vector<std::uint8_t>& out_;
  std::uint32_t fill_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* p, const std::uint8_t* end) : p_(p), end_(end) {}
  std::uint64_t get(std::uint32_t bits) {
    std::uint64_t v = 0;
    for (std::uint32_t i = 0; i < bits; ++i) {
      if (p_ == end_) throw std::runtime_error("bitstream truncated");
      v = (v << 1) | ((*p_ >> (7 - fill_)) & 1);
      fill_ = (fill_ + 1) & 7;
      if (fill_ == 0) ++p_;
    }
    return v;
  }
  void align() {
    if (fill_ != 0) {
      fill_ = 0;
      ++p_;
    }
  }
  const std::uint8_t* cursor() const { return p_; }

 private:
  const std::uint8_t* p_;
  const std::uint8_t* end_;
  std::uint32_t fill_ = 0;
};

bool fits_signed(std::int64_t v, std::uint32_t bits) {
  std::int64_t lo = -(std::int64_t(1) << (bits - 1));
  std::int64_t hi = (std::int64_t(1) << (bits - 1)) - 1;
  return v >= lo && v <= hi;
}

// Returns encoded size in bits for one 64 B line.
std::uint32_t fpc_encode_line(const std::uint8_t* line, BitWriter* bw) {
  const std::uint32_t nwords = kLineBytes / 4;
  std::uint32_t bits = 0;
  std::uint32_t w = 0;
  while (w < nwords) {
    std::uint32_t u;
    std::memcpy(&u, line + w * 4, 4);
    std::int32_t s = static_cast<std::int32_t>(u);
    if (u == 0) {
      std::uint32_t run = 1;
      while (w + run < nwords && run < 8) {
        std::uint32_t nx;
        std::memcpy(&nx, line + (w + run) * 4, 4);
        if (nx != 0) break;
        ++run;
      }
      if (bw) {
        bw->put(0, 3);
        bw->put(run - 1, 3);
      }
      bits += 6;
      w += run;
      continue;
    }
    if (fits_signed(s, 4)) {
      if (bw) { bw->put(1, 3); bw->put(std::uint32_t(s) & 0xf, 4); }
      bits += 7;
    } else if (fits_signed(s, 8)) {
      if (bw) { bw->put(2, 3); bw->put(std::uint32_t(s) & 0xff, 8); }
      bits += 11;
    } else if (fits_signed(s, 16)) {
      if (bw) { bw->put(3, 3); bw->put(std::uint32_t(s) & 0xffff, 16); }
      bits += 19;
    } else if ((u & 0xffff) == 0) {
      if (bw) { bw->put(4, 3); bw->put(u >> 16, 16); }
      bits += 19;
    } else if (fits_signed(static_cast<std::int16_t>(u & 0xffff), 8) &&
               fits_signed(static_cast<std::int16_t>(u >> 16), 8)) {
      if (bw) { bw->put(5, 3); bw->put(((u >> 16) & 0xff) << 8 | (u & 0xff), 16); }
      bits += 19;
    } else if ((u & 0xff) == ((u >> 8) & 0xff) && (u & 0xff) == ((u >> 16) & 0xff) &&
               (u & 0xff) == ((u >> 24) & 0xff)) {
      if (bw) { bw->put(6, 3); bw->put(u & 0xff, 8); }
      bits += 11;
    } else {
      if (bw) { bw->put(7, 3); bw->put(u, 32); }
      bits += 35;
    }
    ++w;
  }
  return bits;
}

void fpc_decode_line(BitReader& br, std::uint8_t* line) {
  const std::uint32_t nwords = kLineBytes / 4;
  std::uint32_t w = 0;
  while (w < nwords) {
    std::uint32_t prefix = static_cast<std::uint32_t>(br.get(3));
    std::uint32_t u = 0;
    switch (prefix) {
      case 0: {
        std::uint32_t run = static_cast<std::uint32_t>(br.get(3)) + 1;
        if (w + run > nwords) throw std::runtime_error("fpc: zero run overflow");
        for (std::uint32_t k = 0; k < run; ++k) std::memset(line + (w + k) * 4, 0, 4);
        w += run;
        continue;
      }
      case 1: {
        std::uint32_t v = static_cast<std::uint32_t>(br.get(4));
        u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v << 28) >> 28);
        break;
      }
      case 2: {
        std::uint32_t v = static_cast<std::uint32_t>(br.get(8));
        u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v << 24) >> 24);
        break;
      }
      case 3: {
        std::uint32_t v = static_cast<std::uint32_t>(br.get(16));
        u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v << 16) >> 16);
        break;
      }
      case 4: u = static_cast<std::uint32_t>(br.get(16)) << 16; break;
      case 5: {
        std::uint32_t v = static_cast<std::uint32_t>(br.get(16));
        std::uint32_t hi = static_cast<std::uint32_t>(
            static_cast<std::int32_t>((v >> 8) << 24) >> 24) & 0xffff;
        std::uint32_t lo = static_cast<std::uint32_t>(
            static_cast<std::int32_t>((v & 0xff) << 24) >> 24) & 0xffff;
        u = (hi << 16) | lo;
        break;
      }
      case 6: {
        std::uint32_t b = static_cast<std::uint32_t>(br.get(8));
        u = b | (b << 8) | (b << 16) | (b << 24);
        break;
      }
      default: u = static_cast<std::uint32_t>(br.get(32)); break;
    }
    std::memcpy(line + w * 4, &u, 4);
    ++w;
  }
}

// ---------------------------------------------------------------------------
// BDI per line: base = first b-byte word, every word stored as a d-byte
// signed delta from it. Valid (b, d) combos ordered by tag.
// ---------------------------------------------------------------------------

struct BdiCombo {
  std::uint32_t base_bytes;
  std::uint32_t delta_bytes;
};
constexpr BdiCombo kBdiCombos[] = {{8, 1}, {8, 2}, {8, 4}, {4, 1}, {4, 2}, {2, 1}};

std::uint64_t read_uint(const std::uint8_t* p, std::uint32_t bytes) {
  std::uint64_t v = 0;
  std::memcpy(&v, p, bytes);  // little-endian host assumed (x86-64 target)
  return v;
}

void store_uint(std::uint8_t* p, std::uint64_t v, std::uint32_t bytes) {
  std::memcpy(p, &v, bytes);
}

bool bdi_try_line(const std::uint8_t* line, const BdiCombo& c,
                  std::vector<std::uint8_t>* out) {
  std::uint32_t n = kLineBytes / c.base_bytes;
  std::uint64_t base = read_uint(line, c.base_bytes);
  std::uint32_t shift = 64 - c.base_bytes * 8;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint64_t w = read_uint(line + i * c.base_bytes, c.base_bytes);
    // Sign-extend the wrapped difference to base width before checking.
    std::int64_t delta =
        static_cast<std::int64_t>((w - base) << shift) >> shift;
    if (!fits_signed(delta, c.delta_bytes * 8)) return false;
    if (out) {
      if (i == 0) {
        std::size_t at = out->size();
        out->resize(at + c.base_bytes);
        store_uint(out->data() + at, base, c.base_bytes);
      }
      std::size_t at = out->size();
      out->resize(at + c.delta_bytes);
      store_uint(out->data() + at, static_cast<std::uint64_t>(delta), c.delta_bytes);
    }
  }
  return true;
}

void bdi_decode_line(const std::uint8_t*& p, const std::uint8_t* end, const BdiCombo& c,
                     std::uint8_t* line) {
  std::uint32_t n = kLineBytes / c.base_bytes;
  std::size_t need = c.base_bytes + std::size_t(n) * c.delta_bytes;
  if (p + need > end) throw std::runtime_error("bdi: truncated line");
  std::uint64_t base = read_uint(p, c.base_bytes);
  p += c.base_bytes;
  std::uint32_t dshift = 64 - c.delta_bytes * 8;
  std::uint64_t mask = c.base_bytes == 8 ? ~0ULL : ((1ULL << (c.base_bytes * 8)) - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::int64_t delta =
        static_cast<std::int64_t>(read_uint(p, c.delta_bytes) << dshift) >> dshift;
    p += c.delta_bytes;
    store_uint(line + i * c.base_bytes, (base + static_cast<std::uint64_t>(delta)) & mask,
               c.base_bytes);
  }
}

// ---------------------------------------------------------------------------
// FVE dictionary helpers.
// ---------------------------------------------------------------------------

constexpr std::uint32_t kFveDictEntries = 32;

std::vector<std::uint64_t> fve_build_dict(const PageImage& page) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> counts;  // value, count
  for (std::uint32_t w = 0; w < kPageBytes / 8; ++w) {
    std::uint64_t v = read_uint(page.data() + w * 8, 8);
    bool found = false;
    for (auto& kv : counts) {
      if (kv.first == v) {
        kv.second++;
        found = true;
        break;
      }
    }
    if (!found) counts.emplace_back(v, 1);
  }
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::uint64_t> dict;
  for (std::uint32_t i = 0; i < kFveDictEntries && i < counts.size(); ++i)
    dict.push_back(counts[i].first);
  while (dict.size() < kFveDictEntries) dict.push_back(0);
  return dict;
}

}  // namespace

CompressedPage lz_compress(const PageImage& page) {
  CompressedPage cp;
  cp.codec = CodecId::Lz;
  std::vector<std::uint8_t> block;
  for (std::uint32_t b = 0; b < 4; ++b) {
    block.clear();
    lz_compress_block(page.data() + b * kLzBlock, block);
    if (block.size() > kLzBlock) {
      cp.payload.push_back(1);  // raw block
      cp.payload.insert(cp.payload.end(), page.data() + b * kLzBlock,
                        page.data() + (b + 1) * kLzBlock);
    } else {
      cp.payload.push_back(0);
      cp.payload.insert(cp.payload.end(), block.begin(), block.end());
    }
  }
  return cp;
}

CompressedPage fpcbdi_compress(const PageImage& page) {
  CompressedPage cp;
  cp.codec = CodecId::FpcBdi;
  std::vector<std::uint8_t> tmp;
  for (std::uint32_t l = 0; l < kLinesPerPage; ++l) {
    const std::uint8_t* line = page.data() + l * kLineBytes;
    std::uint32_t best_bytes = kLineBytes;
    std::uint8_t best_tag = 0;  // raw
    for (std::uint32_t c = 0; c < 6; ++c) {
      const BdiCombo& combo = kBdiCombos[c];
      std::uint32_t size = combo.base_bytes + (kLineBytes / combo.base_bytes) * combo.delta_bytes;
      if (size < best_bytes && bdi_try_line(line, combo, nullptr)) {
        best_bytes = size;
        best_tag = static_cast<std::uint8_t>(1 + c);
      }
    }
    std::uint32_t fpc_bytes = (fpc_encode_line(line, nullptr) + 7) / 8;
    if (fpc_bytes < best_bytes) {
      best_bytes = fpc_bytes;
      best_tag = 7;
    }
    cp.payload.push_back(best_tag);
    if (best_tag == 0) {
      cp.payload.insert(cp.payload.end(), line, line + kLineBytes);
    } else if (best_tag <= 6) {
      bdi_try_line(line, kBdiCombos[best_tag - 1], &cp.payload);
    } else {
      tmp.clear();
      BitWriter bw(tmp);
      fpc_encode_line(line, &bw);
      cp.payload.insert(cp.payload.end(), tmp.begin(), tmp.end());
    }
  }
  return cp;
}

CompressedPage fve_compress(const PageImage& page) {
  CompressedPage cp;
  cp.codec = CodecId::Fve;
  std::vector<std::uint64_t> dict = fve_build_dict(page);

  std::vector<std::uint8_t> bits;
  {
    BitWriter bw(bits);
    for (std::uint32_t w = 0; w < kPageBytes / 8; ++w) {
      std::uint64_t v = read_uint(page.data() + w * 8, 8);
      std::uint32_t idx = kFveDictEntries;
      for (std::uint32_t i = 0; i < kFveDictEntries; ++i) {
        if (dict[i] == v) {
          idx = i;
          break;
        }
      }
      if (idx < kFveDictEntries) {
        bw.put(1, 1);
        bw.put(idx, 5);
      } else {
        bw.put(0, 1);
        bw.put(v, 64);
      }
    }
  }
  std::size_t encoded = 1 + kFveDictEntries * 8 + bits.size();
  if (encoded >= kPageBytes) {
    cp.payload.push_back(1);  // raw page
    cp.payload.insert(cp.payload.end(), page.begin(), page.end());
    return cp;
  }
  cp.payload.push_back(0);
  for (std::uint32_t i = 0; i < kFveDictEntries; ++i) {
    std::size_t at = cp.payload.size();
    cp.payload.resize(at + 8);
    store_uint(cp.payload.data() + at, dict[i], 8);
  }
  cp.payload.insert(cp.payload.end(), bits.begin(), bits.end());
  return cp;
}

CompressedPage compress_page(CodecId codec, const PageImage& page) {
  switch (codec) {
    case CodecId::Lz: return lz_compress(page);
    case CodecId::FpcBdi: return fpcbdi_compress(page);
    case CodecId::Fve: return fve_compress(page);
    case CodecId::None: {
      CompressedPage cp;
      cp.codec = CodecId::None;
      cp.payload.assign(page.begin(), page.end());
      return cp;
    }
  }
  throw std::invalid_argument("bad codec");
}

PageImage decompress_page(const CompressedPage& cp) {
  PageImage page;
  const std::uint8_t* p = cp.payload.data();
  const std::uint8_t* end = p + cp.payload.size();
  switch (cp.codec) {
    case CodecId::None:
      if (cp.payload.size() != kPageBytes) throw std::runtime_error("none: bad payload size");
      std::memcpy(page.data(), p, kPageBytes);
      return page;
    case CodecId::Lz:
      for (std::uint32_t b = 0; b < 4; ++b) {
        if (p >= end) throw std::runtime_error("lz: missing block flag");
        std::uint8_t mode = *p++;
        if (mode == 1) {
          if (p + kLzBlock > end) throw std::runtime_error("lz: truncated raw block");
          std::memcpy(page.data() + b * kLzBlock, p, kLzBlock);
          p += kLzBlock;
        } else if (mode == 0) {
          lz_decompress_block(p, end, page.data() + b * kLzBlock);
        } else {
          throw std::runtime_error("lz: bad block flag");
        }
      }
      return page;
    case CodecId::FpcBdi:
      for (std::uint32_t l = 0; l < kLinesPerPage; ++l) {
        if (p >= end) throw std::runtime_error("fpcbdi: missing tag");
        std::uint8_t tag = *p++;
        std::uint8_t* line = page.data() + l * kLineBytes;
        if (tag == 0) {
          if (p + kLineBytes > end) throw std::runtime_error("fpcbdi: truncated raw line");
          std::memcpy(line, p, kLineBytes);
          p += kLineBytes;
        } else if (tag <= 6) {
          bdi_decode_line(p, end, kBdiCombos[tag - 1], line);
        } else if (tag == 7) {
          BitReader br(p, end);
          fpc_decode_line(br, line);
          br.align();
          p = br.cursor();
        } else {
          throw std::runtime_error("fpcbdi: bad tag");
        }
      }
      return page;
    case CodecId::Fve: {
      if (p >= end) throw std::runtime_error("fve: missing mode");
      std::uint8_t mode = *p++;
      if (mode == 1) {
        if (p + kPageBytes > end) throw std::runtime_error("fve: truncated raw page");
        std::memcpy(page.data(), p, kPageBytes);
        return page;
      }
      if (p + kFveDictEntries * 8 > end) throw std::runtime_error("fve: truncated dictionary");
      std::vector<std::uint64_t> dict(kFveDictEntries);
      for (std::uint32_t i = 0; i < kFveDictEntries; ++i) {
        dict[i] = read_uint(p, 8);
        p += 8;
      }
      BitReader br(p, end);
      for (std::uint32_t w = 0; w < kPageBytes / 8; ++w) {
        std::uint64_t v;
        if (br.get(1)) {
          v = dict[static_cast<std::uint32_t>(br.get(5))];
        } else {
          v = br.get(64);
        }
        store_uint(page.data() + w * 8, v, 8);
      }
      return page;
    }
  }
  throw std::runtime_error("bad codec id");
}

std::vector<std::uint8_t> to_wire(const CompressedPage& cp) {
  std::vector<std::uint8_t> wire;
  wire.reserve(5 + cp.payload.size());
  wire.push_back(static_cast<std::uint8_t>(cp.codec));
  std::uint32_t size = static_cast<std::uint32_t>(cp.payload.size());
  wire.push_back(static_cast<std::uint8_t>(size & 0xff));
  wire.push_back(static_cast<std::uint8_t>((size >> 8) & 0xff));
  wire.push_back(static_cast<std::uint8_t>((size >> 16) & 0xff));
  wire.push_back(static_cast<std::uint8_t>((size >> 24) & 0xff));
  wire.insert(wire.end(), cp.payload.begin(), cp.payload.end());
  return wire;
}

CompressedPage from_wire(const std::vector<std::uint8_t>& wire) {
  if (wire.size() < 5) throw std::runtime_error("wire: truncated header");
  CompressedPage cp;
  if (wire[0] > 3) throw std::runtime_error("wire: bad codec id");
  cp.codec = static_cast<CodecId>(wire[0]);
  std::uint32_t size = std::uint32_t(wire[1]) | (std::uint32_t(wire[2]) << 8) |
                       (std::uint32_t(wire[3]) << 16) | (std::uint32_t(wire[4]) << 24);
  if (wire.size() != 5 + std::size_t(size)) throw std::runtime_error("wire: size mismatch");
  cp.payload.assign(wire.begin() + 5, wire.end());
  return cp;
}

std::uint32_t latency_cycles(CodecId codec, CodecDirection) {
  switch (codec) {
    case CodecId::None: return 0;
    case CodecId::Lz: return 64;
    case CodecId::FpcBdi: return 4 * kLinesPerPage;
    case CodecId::Fve: return 6 * kLinesPerPage;
  }
  return 0;
}

}  // namespace dgsim
