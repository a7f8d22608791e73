// gsim: command-line front end of the simulator.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "gsim/accelerator.hpp"
#include "gsim/dram.hpp"
#include "gsim/graph.hpp"
#include "gsim/metrics.hpp"
#include "gsim/sweep.hpp"

namespace {

using namespace gsim;

struct SimulateArgs {
  std::string accel;
  std::string problem;
  std::string graph;
  std::optional<std::uint64_t> root;
  std::string dram = "ddr4";
  std::uint32_t channels = 1;
  std::string opt = "none";
  std::string out;
  std::string trace;
  std::string values;
  std::uint32_t interval = 0;
  std::optional<std::uint32_t> pes;
  bool undirected = false;
  bool weighted = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const Accelerator which = parse_accelerator(a.accel);
  AccelConfig cfg = make_accel_config(which, parse_problem(a.problem), a.channels, parse_optimizations(a.opt, which));
  cfg.interval_size = a.interval;
  if (a.pes) cfg.p = *a.pes;
  cfg.validate();
  DramConfig dram = resolve_dram(a.dram);

  GraphSource src{a.graph};
  if (a.undirected) src.directed = false;
  src.weighted = a.weighted;
  Graph g = resolve_graph(src);

  std::unique_ptr<std::ofstream> trace;
  if (!a.trace.empty()) {
    trace = std::make_unique<std::ofstream>(a.trace);
    if (!*trace) throw Error("cannot write " + a.trace);
  }
  SingleRun run = run_single(g, a.graph, cfg, dram, a.root, trace.get());

  write_csv_header(std::cout);
  write_csv_row(std::cout, run.row);
  if (!a.out.empty()) write_csv({run.row}, a.out);
  if (!a.values.empty()) {
    std::ofstream vs(a.values);
    if (!vs) throw Error("cannot write " + a.values);
    for (std::size_t v = 0; v < run.result.final_values.size(); ++v) {
      vs << (g.labels.empty() ? v : g.labels[v]) << ' ' << format_double(run.result.final_values[v]) << '\n';
    }
  }
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out, const std::string& summary) {
  SweepConfig c = load_sweep_config(config);
  SweepSummary s = run_sweep(c, out, workers_from_env(), &std::cerr);
  std::cerr << "jobs " << s.jobs << ", ran " << s.ran << ", already present " << s.existing << ", unsupported "
            << s.invalid << '\n';
  if (!summary.empty()) {
    std::ofstream os(summary);
    if (!os) throw Error("cannot write " + summary);
    write_summary(read_csv(out), os);
  }
  return 0;
}

int cmd_replay(const std::string& trace, const std::string& dram) {
  ReplayResult r = replay(read_trace(trace), resolve_dram(dram));
  const DramStats& s = r.stats;
  std::cout << "requests " << s.requests() << "\nreads " << s.reads << "\nwrites " << s.writes << "\nrow_hits "
            << s.row_hits << "\nrow_misses " << s.row_misses << "\nrow_conflicts " << s.row_conflicts
            << "\nbytes " << s.bytes_transferred << "\nelapsed_cycles " << s.elapsed_cycles << "\nutilization "
            << format_double(s.utilization) << "\nmismatched_outcomes " << r.mismatched_outcomes << '\n';
  return r.mismatched_outcomes == 0 ? 0 : 1;
}

int cmd_stats(const std::string& graph, bool undirected, bool diameter) {
  GraphSource src{graph};
  if (undirected) src.directed = false;
  Graph g = resolve_graph(src);
  GraphStats s = stats(g, diameter);
  std::cout << "name " << g.name << "\nn " << g.n << "\nm " << g.original_edge_count << "\nstored_edges " << g.m()
            << "\ndirected " << (g.directed ? 1 : 0) << "\navg_degree " << format_double(s.avg_degree)
            << "\nskewness " << format_double(s.skewness) << '\n';
  if (s.diameter_estimate) std::cout << "diameter_estimate " << *s.diameter_estimate << '\n';
  return 0;
}

int cmd_convert(const std::string& graph, const std::string& out, bool undirected) {
  GraphSource src{graph};
  if (undirected) src.directed = false;
  save_binary(resolve_graph(src), out);
  return 0;
}

int cmd_summary(const std::string& csv) {
  write_summary(read_csv(csv), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-level simulator of FPGA graph processing accelerators"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run one accelerator on one graph");
  simulate->add_option("--accel", sim.accel, "AccuGraph, ForeGraph, HitGraph or ThunderGP")->required();
  simulate->add_option("--problem", sim.problem, "BFS, PR, WCC, SSSP or SpMV")->required();
  simulate->add_option("--graph", sim.graph, "edge list, .gsg cache or rmat:scale:degree:seed")->required();
  simulate->add_option("--root", sim.root, "root vertex (source-file id)");
  simulate->add_option("--dram", sim.dram, "ddr3, ddr3-1600, ddr4, hbm or a config file");
  simulate->add_option("--channels", sim.channels, "memory channels")->check(CLI::PositiveNumber);
  simulate->add_option("--opt", sim.opt, "none, all or a list such as partition_skip+update_filter");
  simulate->add_option("--out", sim.out, "write the metric row to this CSV file");
  simulate->add_option("--trace", sim.trace, "dump the request trace");
  simulate->add_option("--values", sim.values, "dump final vertex values");
  simulate->add_option("--interval", sim.interval, "vertices per interval (default: from the BRAM budget)");
  simulate->add_option("--pes", sim.pes, "ForeGraph PE count");
  simulate->add_flag("--undirected", sim.undirected, "load the edge list as undirected");
  simulate->add_flag("--weighted", sim.weighted, "edge list has a third weight column");

  std::string sweep_config, sweep_out = "sweep.csv", sweep_summary;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep (workers: GSIM_WORKERS)");
  sweep->add_option("config", sweep_config, "sweep description")->required();
  sweep->add_option("--out", sweep_out, "CSV output, appended to and resumed from");
  sweep->add_option("--summary", sweep_summary, "write summary tables here");

  std::string trace_path, replay_dram = "ddr4";
  auto* replay_cmd = app.add_subcommand("replay", "replay a request trace through a fresh DRAM model");
  replay_cmd->add_option("trace", trace_path, "trace CSV")->required();
  replay_cmd->add_option("--dram", replay_dram, "DRAM preset or config file");

  std::string stats_graph;
  bool stats_undirected = false, stats_diameter = false;
  auto* stats_cmd = app.add_subcommand("stats", "print graph properties");
  stats_cmd->add_option("graph", stats_graph)->required();
  stats_cmd->add_flag("--undirected", stats_undirected);
  stats_cmd->add_flag("--diameter", stats_diameter, "estimate the diameter");

  std::string conv_graph, conv_out;
  bool conv_undirected = false;
  auto* convert = app.add_subcommand("convert", "write a binary graph cache");
  convert->add_option("graph", conv_graph)->required();
  convert->add_option("out", conv_out)->required();
  convert->add_flag("--undirected", conv_undirected);

  std::string summary_csv;
  auto* summary = app.add_subcommand("summary", "print summary tables of a result CSV");
  summary->add_option("csv", summary_csv)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*sweep) return cmd_sweep(sweep_config, sweep_out, sweep_summary);
    if (*replay_cmd) return cmd_replay(trace_path, replay_dram);
    if (*stats_cmd) return cmd_stats(stats_graph, stats_undirected, stats_diameter);
    if (*convert) return cmd_convert(conv_graph, conv_out, conv_undirected);
    if (*summary) return cmd_summary(summary_csv);
  } catch (const UsageError& e) {
    std::cerr << "gsim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
