#include <stdexcept>

#include "dgsim/experiment.hpp"
#include "dgsim/simulation.hpp"
#include "doctest.h"

using namespace dgsim;

TEST_CASE("partition arithmetic") {
  CHECK(partition_lines_per_page(0.25) == 21);
  CHECK(partition_lines_per_page(0.5) == 64);
  CHECK(partition_lines_per_page(0.8) == 256);
  CHECK_THROWS_AS(partition_lines_per_page(0.0), std::invalid_argument);
  CHECK_THROWS_AS(partition_lines_per_page(1.0), std::invalid_argument);
  CHECK_THROWS_AS(partition_lines_per_page(-0.1), std::invalid_argument);
}

TEST_CASE("scheme construction matrix") {
  SchemeConfig daemon = build_scheme(SchemeName::DaeMon);
  CHECK(daemon.line_path);
  CHECK(daemon.page_path);
  CHECK(daemon.partitioned);
  CHECK(daemon.partition_ratio == 0.25);
  CHECK(daemon.selection_unit);
  CHECK(daemon.codec == CodecId::Lz);

  SchemeConfig bp = build_scheme("bp", SchemeOverrides{.partition_ratio = 0.5});
  CHECK(bp.partition_ratio == 0.5);
  CHECK(!bp.selection_unit);
  CHECK(bp.codec == CodecId::None);

  SchemeConfig lc = build_scheme(SchemeName::LC);
  CHECK(!lc.line_path);
  CHECK(lc.page_path);
  CHECK(lc.codec == CodecId::Lz);

  SchemeConfig cl = build_scheme(SchemeName::CacheLine);
  CHECK(cl.line_path);
  CHECK(!cl.page_path);
  CHECK(!cl.local_memory);

  SchemeConfig local = build_scheme(SchemeName::Local);
  CHECK(local.local_full_working_set);

  SchemeConfig clpp = build_scheme(SchemeName::CacheLinePlusPage);
  CHECK(clpp.line_path);
  CHECK(clpp.page_path);
  CHECK(!clpp.partitioned);
}

TEST_CASE("scheme names are case-insensitive CLI strings") {
  CHECK(scheme_from_string("daemon") == SchemeName::DaeMon);
  CHECK(scheme_from_string("DAEMON") == SchemeName::DaeMon);
  CHECK(scheme_from_string("CacheLinePlusPage") == SchemeName::CacheLinePlusPage);
  CHECK(scheme_from_string("pagefree") == SchemeName::PageFree);
  CHECK_THROWS_AS(scheme_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("contradictory overrides are rejected") {
  // Remote + LZ is the LC scheme; the alias is guarded
  CHECK_THROWS_AS(build_scheme(SchemeName::Remote, SchemeOverrides{.codec = CodecId::Lz}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(SchemeName::CacheLine, SchemeOverrides{.codec = CodecId::Lz}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(SchemeName::Remote, SchemeOverrides{.partition_ratio = 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(SchemeName::BP, SchemeOverrides{.partition_ratio = 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(SchemeName::DaeMon, SchemeOverrides{.codec = CodecId::None}),
                  std::invalid_argument);
  // LC with a different codec is the compression sensitivity study
  CHECK(build_scheme(SchemeName::LC, SchemeOverrides{.codec = CodecId::FpcBdi}).codec ==
        CodecId::FpcBdi);
}

namespace {

RunMetrics quick_run(const std::string& scheme) {
  ExperimentConfig cfg;
  cfg.scheme = scheme;
  cfg.seed = 11;
  WorkloadSpec w;
  w.config.working_set_pages = 48;
  w.config.locality = LocalityClass::Medium;
  w.config.record_count = 3000;
  w.config.write_fraction = 0.25;
  cfg.workloads.push_back(w);
  return run_experiment(cfg);
}

}  // namespace

TEST_CASE("Remote never moves cache lines; CacheLine never moves pages") {
  RunMetrics remote = quick_run("Remote");
  CHECK(remote.bytes_by_kind[0] == 0);  // line_req
  CHECK(remote.bytes_by_kind[1] == 0);  // line_data
  CHECK(remote.bytes_by_kind[2] > 0);
  CHECK(remote.bytes_by_kind[3] > 0);

  RunMetrics cl = quick_run("CacheLine");
  CHECK(cl.bytes_by_kind[2] == 0);  // page_req
  CHECK(cl.bytes_by_kind[3] == 0);  // page_data
  CHECK(cl.bytes_by_kind[0] > 0);
  CHECK(cl.local_lookups == 0);  // local memory is not used
}

TEST_CASE("BP emits both granularities for every non-inflight page miss") {
  // distinct pages, unsaturated
  std::vector<TraceRecord> t;
  for (std::uint32_t i = 0; i < 20; ++i)
    t.push_back({200, Op::Read, i * kPageBytes});
  SimulationParams p;
  p.scheme = build_scheme(SchemeName::BP);
  p.total_pages = 20;
  p.local_capacity_pages = 4;
  Simulation sim(p, {t});
  sim.run();
  CHECK(sim.engine().counters().issued_pages == 20);
  CHECK(sim.engine().counters().issued_lines == 20);
}

TEST_CASE("Local serves everything locally") {
  RunMetrics local = quick_run("Local");
  CHECK(local.hit_ratio == 1.0);
  CHECK(local.total_link_bytes == 0);
  CHECK(local.remote_accesses == 0);
}

TEST_CASE("PageFree moves no page bytes and stays near Local") {
  RunMetrics pf = quick_run("PageFree");
  CHECK(pf.bytes_by_kind[3] == 0);  // page data is free
  RunMetrics local = quick_run("Local");
  CHECK(pf.total_cycles >= local.total_cycles);
}
