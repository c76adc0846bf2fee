#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>

#include "dgsim/experiment.hpp"

namespace py = pybind11;
using namespace dgsim;

namespace {

PageImage page_from_bytes(const py::bytes& data) {
  std::string s = data;
  if (s.size() != kPageBytes) throw std::invalid_argument("expected exactly 4096 bytes");
  PageImage page;
  std::memcpy(page.data(), s.data(), kPageBytes);
  return page;
}

py::dict metrics_to_dict(const ExperimentConfig& cfg, const RunMetrics& m) {
  py::dict d;
  d["scheme"] = cfg.scheme;
  d["seed"] = cfg.seed;
  py::list cores;
  for (const CoreMetrics& cm : m.cores) {
    py::dict c;
    c["records"] = cm.records;
    c["cycles"] = cm.cycles;
    c["pseudo_ipc"] = cm.pseudo_ipc;
    c["mean_access_latency_ns"] = cm.mean_access_latency_ns;
    cores.append(c);
  }
  d["cores"] = cores;
  d["total_cycles"] = m.total_cycles;
  d["pseudo_ipc"] = m.pseudo_ipc;
  d["hit_ratio"] = m.hit_ratio;
  d["local_lookups"] = m.local_lookups;
  d["local_hits"] = m.local_hits;
  d["remote_accesses"] = m.remote_accesses;
  d["mean_remote_latency_ns"] = m.mean_remote_latency_ns;
  d["p50_remote_latency_ns"] = m.p50_remote_latency_ns;
  d["p95_remote_latency_ns"] = m.p95_remote_latency_ns;
  d["p99_remote_latency_ns"] = m.p99_remote_latency_ns;
  const char* kind_names[6] = {"line_req", "line_data", "page_req",
                               "page_data", "dirty_line_wb", "dirty_page_wb"};
  py::dict bytes_by_kind;
  for (int k = 0; k < 6; ++k) bytes_by_kind[kind_names[k]] = m.bytes_by_kind[k];
  d["bytes_by_kind"] = bytes_by_kind;
  d["total_link_bytes"] = m.total_link_bytes;
  py::dict counters;
  counters["issued_lines"] = m.counters.issued_lines;
  counters["issued_pages"] = m.counters.issued_pages;
  counters["dropped_lines"] = m.counters.dropped_lines;
  counters["throttled_pages"] = m.counters.throttled_pages;
  counters["rerequested_pages"] = m.counters.rerequested_pages;
  counters["recovered_pages"] = m.counters.recovered_pages;
  counters["dirty_line_wbs"] = m.counters.dirty_line_wbs;
  counters["dirty_page_wbs"] = m.counters.dirty_page_wbs;
  counters["installed_pages"] = m.counters.installed_pages;
  d["counters"] = counters;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dgsim, m) {
  m.doc() = "trace-driven simulator of data movement in disaggregated memory systems";

  m.def("partition_lines_per_page", &partition_lines_per_page, py::arg("ratio"),
        py::arg("page_bytes") = 4096, py::arg("line_bytes") = 64,
        "line slots per page slot at a bandwidth partitioning ratio");

  m.def(
      "generate_trace",
      [](std::uint64_t working_set_pages, const std::string& locality, std::uint64_t records,
         double write_fraction, double compressibility, std::uint64_t seed,
         std::uint32_t mean_gap_cycles) {
        WorkloadConfig cfg;
        cfg.working_set_pages = working_set_pages;
        cfg.locality = locality_from_string(locality);
        cfg.record_count = records;
        cfg.write_fraction = write_fraction;
        cfg.compressibility = compressibility;
        cfg.seed = seed;
        cfg.mean_gap_cycles = mean_gap_cycles;
        py::list out;
        for (const TraceRecord& r : generate_trace(cfg))
          out.append(py::make_tuple(r.gap, r.op == Op::Read ? "R" : "W", r.address));
        return out;
      },
      py::arg("working_set_pages"), py::arg("locality") = "high", py::arg("records") = 10000,
      py::arg("write_fraction") = 0.2, py::arg("compressibility") = 0.5, py::arg("seed") = 1,
      py::arg("mean_gap_cycles") = 12);

  m.def("parse_trace_file", [](const std::string& path) {
    py::list out;
    for (const TraceRecord& r : parse_trace_file(path))
      out.append(py::make_tuple(r.gap, r.op == Op::Read ? "R" : "W", r.address));
    return out;
  });

  m.def(
      "locality_profile",
      [](const std::string& path) {
        auto p = locality_profile(parse_trace_file(path));
        py::dict d;
        d["mean_lines_per_visit"] = p.mean_lines_per_visit;
        d["write_fraction"] = p.write_fraction;
        d["visits"] = p.visits;
        d["pages"] = p.pages;
        d["reuse_distance_histogram"] = p.reuse_distance_histogram;
        return d;
      },
      py::arg("trace_path"));

  m.def(
      "synthesize_page_content",
      [](std::uint64_t page_id, double compressibility, std::uint64_t seed) {
        PageImage p = synthesize_page_content(page_id, compressibility, seed);
        return py::bytes(reinterpret_cast<const char*>(p.data()), p.size());
      },
      py::arg("page_id"), py::arg("compressibility"), py::arg("seed"));

  m.def(
      "compress_page",
      [](const std::string& codec, const py::bytes& page) {
        CompressedPage cp = compress_page(codec_from_string(codec), page_from_bytes(page));
        auto wire = to_wire(cp);
        return py::bytes(reinterpret_cast<const char*>(wire.data()), wire.size());
      },
      py::arg("codec"), py::arg("page"), "compress a 4096-byte page to its wire format");

  m.def(
      "decompress_page",
      [](const py::bytes& wire) {
        std::string s = wire;
        std::vector<std::uint8_t> bytes(s.begin(), s.end());
        PageImage page = decompress_page(from_wire(bytes));
        return py::bytes(reinterpret_cast<const char*>(page.data()), page.size());
      },
      py::arg("wire"));

  m.def(
      "compressed_size",
      [](const std::string& codec, const py::bytes& page) {
        return compress_page(codec_from_string(codec), page_from_bytes(page)).compressed_size();
      },
      py::arg("codec"), py::arg("page"));

  m.def(
      "codec_latency_cycles",
      [](const std::string& codec) {
        return latency_cycles(codec_from_string(codec), CodecDirection::Compress);
      },
      py::arg("codec"));

  m.def(
      "build_scheme",
      [](const std::string& name, py::object ratio, py::object codec) {
        SchemeOverrides ov;
        if (!ratio.is_none()) ov.partition_ratio = ratio.cast<double>();
        if (!codec.is_none()) ov.codec = codec_from_string(codec.cast<std::string>());
        SchemeConfig c = build_scheme(name, ov);
        py::dict d;
        d["name"] = to_string(c.name);
        d["line_path"] = c.line_path;
        d["page_path"] = c.page_path;
        d["partitioned"] = c.partitioned;
        d["partition_ratio"] = c.partition_ratio;
        d["selection_unit"] = c.selection_unit;
        d["codec"] = to_string(c.codec);
        d["local_memory"] = c.local_memory;
        return d;
      },
      py::arg("name"), py::arg("partition_ratio") = py::none(), py::arg("codec") = py::none());

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        ExperimentConfig cfg = parse_config(config_text);
        RunMetrics metrics = run_experiment(cfg);
        return metrics_to_dict(cfg, metrics);
      },
      py::arg("config_text"), "run one experiment from config text (sections or JSON)");

  m.def(
      "run_experiment_csv",
      [](const std::string& config_text) {
        ExperimentConfig cfg = parse_config(config_text);
        return metrics_csv(cfg, run_experiment(cfg));
      },
      py::arg("config_text"));

  m.def(
      "sweep_csv",
      [](const std::string& config_text, const std::string& axes, const std::string& baseline) {
        ExperimentConfig cfg = parse_config(config_text);
        return run_sweep(cfg, parse_axes(axes), baseline);
      },
      py::arg("config_text"), py::arg("axes"), py::arg("baseline") = "Remote");
}
