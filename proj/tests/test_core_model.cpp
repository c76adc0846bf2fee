#include <stdexcept>

#include "dgsim/experiment.hpp"
#include "dgsim/simulation.hpp"
#include "doctest.h"

using namespace dgsim;

namespace {

// Fixed-latency remote line path: one unloaded request under CacheLine costs
//   up(16 B) + memory line service + down(80 B)
// = 103,765 + 37,530 + 118,824 ps at 100 ns switch and factor 1/4.
constexpr Tick kLineRtt = 103765 + 37530 + 118824;

SimulationParams cacheline_params() {
  SimulationParams p;
  p.scheme = build_scheme(SchemeName::CacheLine);
  p.total_pages = 64;
  return p;
}

Tick run_cacheline(std::vector<TraceRecord> trace, std::uint32_t window_limit) {
  SimulationParams p = cacheline_params();
  p.window_limit = window_limit;
  Simulation sim(p, {std::move(trace)});
  sim.run();
  REQUIRE(sim.all_requests_completed());
  return sim.core(0).finish_tick();
}

}  // namespace

TEST_CASE("window_limit=1 serializes back-to-back misses") {
  // two distinct lines, zero gaps
  std::vector<TraceRecord> t{{0, Op::Read, 0x0}, {0, Op::Read, 0x40}};
  CHECK(run_cacheline(t, 1) == 2 * kLineRtt);
}

TEST_CASE("window_limit=2 overlaps the misses") {
  std::vector<TraceRecord> t{{0, Op::Read, 0x0}, {0, Op::Read, 0x40}};
  Tick finish = run_cacheline(t, 2);
  CHECK(finish >= kLineRtt);
  // overlapped up to queueing on the shared link and bus
  CHECK(finish < Tick(1.35 * kLineRtt));
}

TEST_CASE("compute-bound trace: gaps dominate when G >= L") {
  // gap G = 1000 cycles = 278,000 ps >= kLineRtt
  const Tick g = 1000 * kDefaultCycleTicks;
  REQUIRE(g >= kLineRtt);
  std::vector<TraceRecord> t{{1000, Op::Read, 0x0}, {1000, Op::Read, 0x40}};
  CHECK(run_cacheline(t, 1) == 2 * g + kLineRtt);
}

TEST_CASE("increasing the window never increases total cycles") {
  WorkloadConfig cfg;
  cfg.working_set_pages = 32;
  cfg.locality = LocalityClass::Poor;
  cfg.record_count = 2000;
  cfg.mean_gap_cycles = 4;
  for (std::uint64_t seed : {1, 2, 3}) {
    cfg.seed = seed;
    auto trace = generate_trace(cfg);
    Tick prev = UINT64_MAX;
    for (std::uint32_t w : {1u, 2u, 8u, 32u, 128u}) {
      Tick finish = run_cacheline(trace, w);
      CHECK(finish <= prev);
      prev = finish;
    }
  }
}

TEST_CASE("every request completes exactly once") {
  WorkloadConfig cfg;
  cfg.working_set_pages = 16;
  cfg.locality = LocalityClass::Medium;
  cfg.record_count = 3000;
  cfg.write_fraction = 0.3;
  cfg.seed = 5;
  SimulationParams p;
  p.scheme = build_scheme(SchemeName::DaeMon);
  p.total_pages = 16;
  p.local_capacity_pages = 4;
  p.llc_dirty_capacity = 64;
  Simulation sim(p, {generate_trace(cfg)});
  sim.run();
  CHECK(sim.all_requests_completed());
  CHECK(sim.engine().counters().completions == 3000);
}

TEST_CASE("pseudo-ipc is records over cycles") {
  std::vector<TraceRecord> t{{0, Op::Read, 0x0}, {0, Op::Read, 0x40}};
  SimulationParams p = cacheline_params();
  Simulation sim(p, {t});
  sim.run();
  RunMetrics m = collect_metrics(sim);
  CHECK(m.cores[0].records == 2);
  CHECK(m.cores[0].cycles == (sim.core(0).finish_tick() + kDefaultCycleTicks - 1) /
                                 kDefaultCycleTicks);
  CHECK(m.cores[0].pseudo_ipc ==
        doctest::Approx(2.0 / static_cast<double>(m.cores[0].cycles)));
}
