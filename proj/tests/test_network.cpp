#include <stdexcept>
#include "dgsim/network.hpp"
#include "doctest.h"

using namespace dgsim;

namespace {
constexpr std::uint64_t kQuarter = 17ULL * 1000 * 1000 * 1000 / 4;  // 4.25 GB/s
constexpr std::uint64_t kHalf = 17ULL * 1000 * 1000 * 1000 / 2;     // 8.5 GB/s
}  // namespace

TEST_CASE("transfer_time arithmetic from the table parameters") {
  LinkModel quarter(kQuarter, ns_to_ticks(100));
  CHECK(quarter.up().transfer_time(0, 0) == ns_to_ticks(100));
  // 4096 B at 4.25 GB/s = 963,765 ps (rounded up), plus the switch
  CHECK(quarter.up().transfer_time(0, 4096) == ns_to_ticks(100) + 963765);

  LinkModel half(kHalf, ns_to_ticks(100));
  // 64 B at 8.5 GB/s ~ 7.53 ns
  CHECK(half.up().transfer_time(0, 64) == ns_to_ticks(100) + 7530);
}

TEST_CASE("serialization queues consecutive packets") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  Tick first = link.up().send(0, 4096);
  Tick second = link.up().send(0, 4096);
  CHECK(first == 963765 + ns_to_ticks(100));
  CHECK(second == first + 963765);
}

TEST_CASE("a line packet waits behind a page packet on the same direction") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  link.up().send(0, 4096);
  Tick line_arrival = link.up().send(0, 64);
  // delayed by the residual page serialization
  CHECK(line_arrival > link.up().transfer_time(0, 64));
  CHECK(line_arrival == 963765 + serialization_ticks(64, kQuarter) + ns_to_ticks(100));
}

TEST_CASE("directions are independent") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  link.up().send(0, 4096);
  CHECK(link.down().send(0, 64) == link.down().transfer_time(0, 64));
}

TEST_CASE("link conservation: interval bytes sum to sent bytes") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  std::uint64_t sent = 0;
  for (int i = 0; i < 500; ++i) {
    std::uint32_t bytes = 64 + (i % 7) * 640;
    link.up().send(Tick(i) * 1000000, bytes);
    sent += bytes;
  }
  std::uint64_t accounted = 0;
  for (const auto& [idx, bytes] : link.up().interval_bytes()) accounted += bytes;
  CHECK(accounted == sent);
  CHECK(link.up().total_bytes() == sent);
}

TEST_CASE("in-order arrivals per direction") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  Tick prev = 0;
  for (int i = 0; i < 100; ++i) {
    Tick a = link.up().send(Tick(i) * 10, (i % 2) ? 4096 : 64);
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("saturated interval reports full utilization") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  // back-to-back pages over more than one interval
  for (int i = 0; i < 600; ++i) link.up().send(0, 4096);
  auto util = link.up().interval_utilization();
  REQUIRE(!util.empty());
  CHECK(util[0].utilization >= 0.99);
  CHECK(util[0].utilization <= 1.0 + 1e-9);
}

TEST_CASE("disturbance reduces effective bandwidth inside its window") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  link.inject_disturbance({{ns_to_ticks(1000), ns_to_ticks(2000), 0.5}});
  // fraction 0.5 doubles the payload serialization term
  CHECK(link.up().transfer_time(0, 4096) == ns_to_ticks(100) + 963765);
  CHECK(link.up().transfer_time(ns_to_ticks(1500), 4096) == ns_to_ticks(100) + 2 * 963765);
  CHECK(link.up().transfer_time(ns_to_ticks(2500), 4096) == ns_to_ticks(100) + 963765);
}

TEST_CASE("fraction-zero disturbance changes nothing") {
  LinkModel a(kQuarter, ns_to_ticks(100));
  LinkModel b(kQuarter, ns_to_ticks(100));
  b.inject_disturbance({{0, ns_to_ticks(1000000), 0.0}});
  for (int i = 0; i < 50; ++i) {
    CHECK(a.up().send(Tick(i) * 12345, 64 + i) == b.up().send(Tick(i) * 12345, 64 + i));
  }
}

TEST_CASE("overlapping disturbance windows are rejected") {
  LinkModel link(kQuarter, ns_to_ticks(100));
  CHECK_THROWS_AS(link.inject_disturbance({{0, 100, 0.5}, {50, 150, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(link.inject_disturbance({{0, 100, 1.5}}), std::invalid_argument);
}

TEST_CASE("transfer_time is monotone in payload and antitone in bandwidth") {
  LinkModel lo(kQuarter, ns_to_ticks(100));
  LinkModel hi(kHalf, ns_to_ticks(100));
  Tick prev = 0;
  for (std::uint32_t bytes = 0; bytes <= 8192; bytes += 512) {
    Tick t = lo.up().transfer_time(0, bytes);
    CHECK(t >= prev);
    CHECK(hi.up().transfer_time(0, bytes) <= t);
    prev = t;
  }
}
