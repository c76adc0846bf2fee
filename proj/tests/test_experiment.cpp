#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dgsim/experiment.hpp"
#include "doctest.h"

using namespace dgsim;

namespace {

const char* kIni = R"(# example config
[run]
scheme = DaeMon
seed = 9
switch_latency_ns = 400
bandwidth_factor = 1/8
replacement_policy = fifo
local_memory_fraction = 0.25
n_memory_components = 2
controller_policy = work-conserving

[workload]
working_set_pages = 40
locality = poor
records = 1500
write_fraction = 0.1
compressibility = 0.9

[disturbance]
windows = 0:50000:0.5;100000:150000:0.25
)";

const char* kJson = R"({
  "run": {"scheme": "DaeMon", "seed": 9, "switch_latency_ns": 400,
          "bandwidth_factor": "1/8", "replacement_policy": "fifo",
          "local_memory_fraction": 0.25, "n_memory_components": 2,
          "controller_policy": "work-conserving"},
  "workload": {"working_set_pages": 40, "locality": "poor", "records": 1500,
               "write_fraction": 0.1, "compressibility": 0.9},
  "disturbance": {"windows": "0:50000:0.5;100000:150000:0.25"}
})";

}  // namespace

TEST_CASE("INI and JSON configs load identically") {
  ExperimentConfig a = parse_config(kIni);
  ExperimentConfig b = parse_config(kJson);
  CHECK(a.scheme == b.scheme);
  CHECK(a.seed == b.seed);
  CHECK(a.switch_latency_ns == b.switch_latency_ns);
  CHECK(a.bandwidth_factor == b.bandwidth_factor);
  CHECK(a.replacement_policy == b.replacement_policy);
  CHECK(a.n_memory_components == 2);
  CHECK(a.workloads.size() == 1);
  CHECK(a.workloads[0].config.working_set_pages == 40);
  CHECK(a.disturbance.size() == 2);
  CHECK(a.disturbance[1].fraction == 0.25);
  // and they produce byte-identical metrics
  CHECK(metrics_csv(a, run_experiment(a)) == metrics_csv(b, run_experiment(b)));
}

TEST_CASE("config errors carry field paths") {
  CHECK_THROWS_WITH_AS(parse_config("[run]\nbogus_key = 1\n"),
                       doctest::Contains("run.bogus_key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("[workload]\nrecords = abc\n"),
                       doctest::Contains("workload.records"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), std::invalid_argument);
}

TEST_CASE("fraction parsing") {
  CHECK(parse_fraction("1/4") == 0.25);
  CHECK(parse_fraction("0.125") == 0.125);
  CHECK(parse_fraction("1/16") == doctest::Approx(0.0625));
  CHECK_THROWS_AS(parse_fraction("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fraction("-1/4"), std::invalid_argument);
}

TEST_CASE("core/trace count mismatch is rejected") {
  ExperimentConfig cfg;
  cfg.n_cores = 3;
  WorkloadSpec w;
  w.config.record_count = 10;
  cfg.workloads = {w, w};  // two workloads, three cores
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  ExperimentConfig cfg = parse_config(kIni);
  std::string a = metrics_csv(cfg, run_experiment(cfg));
  std::string b = metrics_csv(cfg, run_experiment(cfg));
  CHECK(a == b);
  CHECK(a.find("scheme,seed,core") == 0);
  CHECK(a.find("interval_start_ns,link_id,utilization") != std::string::npos);
}

TEST_CASE("sweep cardinality and speedup columns") {
  ExperimentConfig base;
  base.seed = 21;
  WorkloadSpec w;
  w.config.working_set_pages = 32;
  w.config.locality = LocalityClass::Medium;
  w.config.record_count = 1200;
  base.workloads.push_back(w);

  SweepAxes axes = parse_axes("scheme=Remote,DaeMon;switch_latency_ns=100,400;bandwidth_factor=1/2,1/4,1/8");
  std::string csv = run_sweep(base, axes);
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 1 + 12);  // header + 2*2*3 cells

  // every Remote row is its own baseline
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.rfind("Remote,", 0) == 0) {
      CHECK(line.substr(line.rfind(',') + 1) == "1.000000");
    }
  }
}

TEST_CASE("sweep validation") {
  ExperimentConfig base;
  WorkloadSpec w;
  w.config.record_count = 10;
  base.workloads.push_back(w);
  CHECK_THROWS_AS(parse_axes(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_axes("scheme="), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(base, parse_axes("scheme=DaeMon,LC")), std::invalid_argument);
}

TEST_CASE("multi-core symmetric workloads give symmetric metrics") {
  ExperimentConfig cfg;
  cfg.scheme = "DaeMon";
  cfg.n_cores = 2;
  cfg.seed = 5;
  WorkloadSpec w;
  w.config.working_set_pages = 24;
  w.config.locality = LocalityClass::Medium;
  w.config.record_count = 6000;  // long enough to wash out the cold-start transient
  w.config.seed = 77;
  w.seed_explicit = true;  // identical trace per core (addresses offset apart)
  cfg.workloads = {w, w};
  RunMetrics m = run_experiment(cfg);
  REQUIRE(m.cores.size() == 2);
  CHECK(m.cores[0].records == m.cores[1].records);
  double ratio = static_cast<double>(m.cores[0].cycles) / m.cores[1].cycles;
  CHECK(ratio > 0.95);
  CHECK(ratio < 1.05);
}

TEST_CASE("heterogeneous multi-core pair runs under one engine") {
  ExperimentConfig cfg;
  cfg.scheme = "DaeMon";
  cfg.n_cores = 2;
  cfg.seed = 6;
  cfg.local_memory_fraction = 0.15;
  WorkloadSpec poor, high;
  poor.config.working_set_pages = 32;
  poor.config.locality = LocalityClass::Poor;
  poor.config.record_count = 1500;
  high.config.working_set_pages = 32;
  high.config.locality = LocalityClass::High;
  high.config.record_count = 1500;
  cfg.workloads = {poor, high};
  RunMetrics m = run_experiment(cfg);
  REQUIRE(m.cores.size() == 2);
  CHECK(m.cores[0].records == 1500);
  CHECK(m.cores[1].records == 1500);
  CHECK(m.hit_ratio > 0.0);
}

TEST_CASE("trace files round-trip through gen-trace style io") {
  WorkloadConfig wc;
  wc.working_set_pages = 16;
  wc.record_count = 500;
  wc.seed = 3;
  auto trace = generate_trace(wc);
  std::string path = "/tmp/dgsim_test_trace.txt";
  write_trace_file(path, trace);
  ExperimentConfig cfg;
  cfg.scheme = "Remote";
  WorkloadSpec w;
  w.trace_path = path;
  cfg.workloads.push_back(w);
  RunMetrics m = run_experiment(cfg);
  CHECK(m.cores[0].records == 500);
  std::remove(path.c_str());
}
