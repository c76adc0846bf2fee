#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dgsim/experiment.hpp"

namespace {

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgsim: trace-driven simulator of data movement in disaggregated memory systems"};
  app.require_subcommand(1);

  std::string config_path, out_path, util_out, axes_spec, baseline = "Remote";
  std::string trace_path;
  bool dump_counters = false;

  CLI::App* run = app.add_subcommand("run", "run one experiment and emit a metrics CSV");
  run->add_option("--config", config_path, "config file (sections or JSON)")->required();
  run->add_option("--out", out_path, "metrics CSV path (default stdout)");
  run->add_flag("--counters", dump_counters, "print engine debug counters to stderr");

  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of experiments");
  sweep->add_option("--config", config_path, "base config file")->required();
  sweep->add_option("--axes", axes_spec,
                    "axis spec, e.g. scheme=Remote,DaeMon;bandwidth_factor=1/2,1/4")
      ->required();
  sweep->add_option("--out", out_path, "sweep CSV path (default stdout)");
  sweep->add_option("--baseline", baseline, "speedup baseline scheme (default Remote)");

  CLI::App* gen = app.add_subcommand("gen-trace", "generate a trace from a workload config");
  gen->add_option("--config", config_path, "config file with a [workload] section")->required();
  gen->add_option("--out", out_path, "trace file path")->required();

  CLI::App* profile = app.add_subcommand("profile", "locality statistics for a trace file");
  profile->add_option("--trace", trace_path, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      dgsim::ExperimentConfig cfg = dgsim::load_config_file(config_path);
      dgsim::PreparedRun prepared = dgsim::prepare_run(cfg);
      dgsim::Simulation sim(prepared.sim, std::move(prepared.traces));
      sim.run();
      if (!sim.all_requests_completed())
        throw std::logic_error("simulation finished with incomplete requests");
      dgsim::RunMetrics metrics = dgsim::collect_metrics(sim);
      write_output(out_path, dgsim::metrics_csv(cfg, metrics));
      if (dump_counters) sim.engine().dump_counters(std::cerr);
    } else if (sweep->parsed()) {
      dgsim::ExperimentConfig cfg = dgsim::load_config_file(config_path);
      dgsim::SweepAxes axes = dgsim::parse_axes(axes_spec);
      write_output(out_path, dgsim::run_sweep(cfg, axes, baseline));
    } else if (gen->parsed()) {
      dgsim::ExperimentConfig cfg = dgsim::load_config_file(config_path);
      if (cfg.workloads.empty()) throw std::invalid_argument("config has no [workload] section");
      dgsim::WorkloadSpec spec = cfg.workloads[0];
      if (!spec.seed_explicit) spec.config.seed = dgsim::derive_seed(cfg.seed, 100);
      dgsim::write_trace_file(out_path, dgsim::generate_trace(spec.config));
    } else if (profile->parsed()) {
      auto trace = dgsim::parse_trace_file(trace_path);
      auto p = dgsim::locality_profile(trace);
      std::cout << "records," << trace.size() << "\n"
                << "pages," << p.pages << "\n"
                << "visits," << p.visits << "\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f", p.mean_lines_per_visit);
      std::cout << "mean_lines_per_visit," << buf << "\n";
      std::snprintf(buf, sizeof buf, "%.4f", p.write_fraction);
      std::cout << "write_fraction," << buf << "\n";
      std::cout << "reuse_distance_histogram";
      for (std::uint64_t v : p.reuse_distance_histogram) std::cout << "," << v;
      std::cout << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
