#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsim/accelerator.hpp"
#include "gsim/metrics.hpp"

namespace gsim {

/// Root to use on `g`: `requested` is a source-file vertex id.
VertexId resolve_root(const Graph& g, std::optional<std::uint64_t> requested);

struct SingleRun {
  RunResult result;
  MetricRow row;
};

SingleRun run_single(const Graph& g, const std::string& graph_label, const AccelConfig& cfg, const DramConfig& dram,
                     std::optional<std::uint64_t> root, std::ostream* trace = nullptr);

/// List-valued sweep description, one "key = a, b, c" per line.
/// Keys: accelerators, problems, graphs, dram, channels, optimizations,
/// root, interval_size, bram_budget_bytes.
struct SweepConfig {
  std::vector<Accelerator> accelerators;
  std::vector<Problem> problems;
  std::vector<std::string> graphs;
  std::vector<std::string> drams{"ddr4"};
  std::vector<std::uint32_t> channels{1};
  std::vector<std::string> optimizations{"none"};
  std::optional<std::uint64_t> root;
  std::uint32_t interval_size = 0;
  std::uint64_t bram_budget_bytes = 1 << 20;
};

SweepConfig parse_sweep_config(std::string_view text, std::string_view origin = "<string>");
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct SweepJob {
  std::size_t graph = 0;  // index into SweepConfig::graphs
  std::string dram;
  AccelConfig cfg;
};

/// Cartesian product in declaration order (accelerator, problem, graph,
/// dram, channels, optimizations). Unsupported combinations are dropped and
/// counted in `invalid`.
std::vector<SweepJob> expand(const SweepConfig& config, std::size_t* invalid = nullptr);

struct SweepSummary {
  std::size_t jobs = 0;
  std::size_t invalid = 0;
  std::size_t existing = 0;  // already present in the output
  std::size_t ran = 0;
};

/// Runs every job not yet present in `out` and appends rows in job order.
SweepSummary run_sweep(const SweepConfig& config, const std::filesystem::path& out, unsigned workers,
                       std::ostream* log = nullptr);

/// Worker count from GSIM_WORKERS, else the hardware concurrency.
unsigned workers_from_env();

}  // namespace gsim
