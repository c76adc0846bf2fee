#include <stdexcept>
#include "dgsim/local_memory.hpp"
#include "dgsim/rng.hpp"
#include "doctest.h"

using namespace dgsim;

namespace {
PageImage page_of_byte(std::uint8_t b) {
  PageImage p;
  p.fill(b);
  return p;
}
}  // namespace

TEST_CASE("frozen lookup latencies at table parameters") {
  LocalMemory lm(4, ReplacementPolicy::ApproxLru);
  lm.install(1, page_of_byte(0), false);
  // hit: 2 x 15 ns processing + 64 B at 17 GB/s (3765 ps, rounded up)
  CHECK(lm.lookup(1).latency == 33765);
  CHECK(lm.lookup(2).latency == 18765);
  CHECK(lm.lookup(1).hit);
  CHECK(!lm.lookup(2).hit);
}

TEST_CASE("LRU evicts the least recently touched page") {
  LocalMemory lm(2, ReplacementPolicy::ApproxLru);
  CHECK(!lm.install(1, page_of_byte(1), false).has_value());
  CHECK(!lm.install(2, page_of_byte(2), false).has_value());
  SUBCASE("no touches: first install is the victim") {
    auto ev = lm.install(3, page_of_byte(3), false);
    REQUIRE(ev.has_value());
    CHECK(ev->page_id == 1);
  }
  SUBCASE("touching 1 makes 2 the victim") {
    lm.lookup(1);
    auto ev = lm.install(3, page_of_byte(3), false);
    REQUIRE(ev.has_value());
    CHECK(ev->page_id == 2);
  }
}

TEST_CASE("FIFO ignores touches") {
  LocalMemory lm(2, ReplacementPolicy::Fifo);
  lm.install(1, page_of_byte(1), false);
  lm.install(2, page_of_byte(2), false);
  lm.lookup(1);
  auto ev = lm.install(3, page_of_byte(3), false);
  REQUIRE(ev.has_value());
  CHECK(ev->page_id == 1);
}

TEST_CASE("double install is rejected") {
  LocalMemory lm(2, ReplacementPolicy::ApproxLru);
  lm.install(1, page_of_byte(1), false);
  CHECK_THROWS_AS(lm.install(1, page_of_byte(1), false), std::logic_error);
}

TEST_CASE("zero capacity misses everything and bounces installs") {
  LocalMemory lm(0, ReplacementPolicy::ApproxLru);
  auto ev = lm.install(1, page_of_byte(1), true);
  REQUIRE(ev.has_value());
  CHECK(ev->page_id == 1);
  CHECK(ev->dirty);
  CHECK(!lm.lookup(1).hit);
  CHECK(lm.size() == 0);
}

TEST_CASE("dirty bit follows the page out") {
  LocalMemory lm(1, ReplacementPolicy::ApproxLru);
  lm.install(7, page_of_byte(7), false);
  lm.mark_dirty(7);
  auto ev = lm.install(8, page_of_byte(8), false);
  REQUIRE(ev.has_value());
  CHECK(ev->page_id == 7);
  CHECK(ev->dirty);
}

TEST_CASE("line reads return the bytes last written") {
  LocalMemory lm(2, ReplacementPolicy::ApproxLru);
  lm.install(3, page_of_byte(0xaa), false);
  std::uint8_t line[kLineBytes];
  for (auto& b : line) b = 0x5c;
  lm.write_line(3, 9, line);
  auto got = lm.read_line(3, 9);
  CHECK(got == std::vector<std::uint8_t>(kLineBytes, 0x5c));
  CHECK(lm.read_line(3, 8) == std::vector<std::uint8_t>(kLineBytes, 0xaa));
  CHECK_THROWS_AS(lm.read_line(3, 64), std::invalid_argument);
  CHECK_THROWS_AS(lm.read_line(99, 0), std::invalid_argument);
  CHECK_THROWS_AS(lm.mark_dirty(99), std::invalid_argument);
}

TEST_CASE("capacity holds under random operation sequences") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::uint64_t cap = 1 + rng.below(8);
    LocalMemory lm(cap, trial % 2 ? ReplacementPolicy::ApproxLru : ReplacementPolicy::Fifo);
    for (int i = 0; i < 500; ++i) {
      std::uint64_t page = rng.below(32);
      switch (rng.below(3)) {
        case 0:
          lm.lookup(page);
          break;
        case 1:
          if (!lm.resident(page)) lm.install(page, page_of_byte(std::uint8_t(page)), false);
          break;
        default:
          if (lm.resident(page)) lm.mark_dirty(page);
          break;
      }
      CHECK(lm.size() <= cap);
    }
  }
}
