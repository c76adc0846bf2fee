#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgsim/workload.hpp"

namespace dgsim {

enum class CodecId : std::uint8_t { None = 0, Lz = 1, FpcBdi = 2, Fve = 3 };

const char* to_string(CodecId id);
CodecId codec_from_string(const std::string& s);

// A compressed 4 KB page. `compressed_size()` is the size on the wire
// including the 4-byte size header; the codec id travels in the fixed
// packet header.
struct CompressedPage {
  CodecId codec = CodecId::None;
  std::vector<std::uint8_t> payload;

  std::uint32_t compressed_size() const {
    return 4 + static_cast<std::uint32_t>(payload.size());
  }
};

// Every codec stays within a small constant of the raw page size via a
// raw-fallback path.
constexpr std::uint32_t kMaxCompressedOverhead = 128;

// Four independent 1 KB blocks; within a block greedy LZ77 with a 256 B
// sliding window and minimum match length 3. Blocks whose encoding would
// exceed 1 KB are stored raw behind a 1-byte mode flag.
CompressedPage lz_compress(const PageImage& page);

// Per 64 B line: best of BDI (bases 8/4/2 bytes, delta widths 1/2/4), FPC
// 32-bit-word pattern coding, or raw, behind a 1-byte scheme tag.
CompressedPage fpcbdi_compress(const PageImage& page);

// 32-entry dictionary of frequent 64-bit values, transmitted with the
// payload (256 B); hits code as 1+5 bits, misses as 1+64 bits.
CompressedPage fve_compress(const PageImage& page);

CompressedPage compress_page(CodecId codec, const PageImage& page);
PageImage decompress_page(const CompressedPage& cp);

// Byte-exact wire format: [1B codec_id][4B little-endian payload size][payload].
std::vector<std::uint8_t> to_wire(const CompressedPage& cp);
CompressedPage from_wire(const std::vector<std::uint8_t>& wire);

enum class CodecDirection : std::uint8_t { Compress, Decompress };

// Latency model per page: LZ 64 cycles each direction; FPC+BDI 4 cycles and
// FVE 6 cycles per 64 B line.
std::uint32_t latency_cycles(CodecId codec, CodecDirection dir);

}  // namespace dgsim
