#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gsim/algorithms.hpp"
#include "gsim/dram.hpp"
#include "gsim/flow.hpp"
#include "gsim/graph.hpp"

namespace gsim {

enum class Accelerator { AccuGraph, ForeGraph, HitGraph, ThunderGP };
std::string_view to_string(Accelerator a);
Accelerator parse_accelerator(std::string_view s);

enum class Optimization : unsigned {
  PrefetchSkip,
  PartitionSkip,
  ShardSkip,
  EdgeShuffle,
  StrideMap,
  DstSort,
  UpdateCombine,
  UpdateFilter,
  ChunkSchedule,
};
inline constexpr unsigned kOptimizationCount = 9;
std::string_view to_string(Optimization o);
/// Whether the optimization exists on accelerator `a`.
bool applies_to(Optimization o, Accelerator a);

class OptimizationSet {
 public:
  OptimizationSet() = default;
  bool has(Optimization o) const { return (bits_ >> static_cast<unsigned>(o)) & 1u; }
  OptimizationSet& add(Optimization o) {
    bits_ |= 1u << static_cast<unsigned>(o);
    return *this;
  }
  OptimizationSet& remove(Optimization o) {
    bits_ &= ~(1u << static_cast<unsigned>(o));
    return *this;
  }
  bool empty() const { return bits_ == 0; }
  unsigned bits() const { return bits_; }
  /// Every optimization owned by `a`.
  static OptimizationSet all(Accelerator a);

  friend bool operator==(OptimizationSet, OptimizationSet) = default;

 private:
  unsigned bits_ = 0;
};

/// "none", "all" or a '+'/',' separated list of flags. "all" expands to the
/// flags owned by `a`.
OptimizationSet parse_optimizations(std::string_view text, Accelerator a);
/// "none" or the flags joined with '+', in declaration order.
std::string to_string(OptimizationSet s);

struct AccelConfig {
  Accelerator which = Accelerator::AccuGraph;
  ProblemSpec problem;
  std::uint32_t p = 1;  // PEs; equals channels for HitGraph and ThunderGP
  std::uint32_t channels = 1;
  OptimizationSet optimizations;
  double clock_mhz = 0.0;                    // 0: accelerator default
  std::uint64_t bram_budget_bytes = 1 << 20; // on-chip value storage
  std::uint32_t interval_size = 0;           // 0: derived from the BRAM budget
  std::uint32_t pipeline_width = 8;          // AccuGraph edges per cycle
  std::uint32_t source_buffer_entries = 65536;  // ThunderGP duplicate filter
  std::uint64_t weight_seed = 1;             // for weighted problems on unweighted graphs
  std::uint64_t stall_budget = 1'000'000;

  double effective_clock_mhz() const;
  /// Throws UsageError when the combination is not supported.
  void validate() const;
};

/// Sets p, channels and the default PE count of the accelerator.
AccelConfig make_accel_config(Accelerator which, Problem problem, std::uint32_t channels = 1,
                              OptimizationSet optimizations = {});

/// Vertices per interval for `g` under `cfg`.
std::uint32_t derive_interval_size(const AccelConfig& cfg, std::uint32_t n);

struct RunResult {
  Accelerator which = Accelerator::AccuGraph;
  Problem problem = Problem::BFS;
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t original_edge_count = 0;
  std::uint32_t interval_size = 0;
  std::uint32_t partitions = 0;

  double elapsed_ns = 0.0;
  unsigned iterations = 0;
  double mteps = 0.0;
  double mreps = 0.0;
  double bytes_per_edge = 0.0;

  std::uint64_t edges_read_total = 0;  // edge records fetched, null pads included
  std::vector<std::uint64_t> edges_read_per_iteration;
  std::vector<std::uint64_t> values_read_per_iteration;
  std::uint64_t updates_written = 0;

  std::uint64_t total_requests = 0;
  std::uint64_t total_bytes = 0;  // line bytes moved over the bus
  std::map<std::pair<RegionKind, AccessKind>, std::uint64_t> payload_bytes;
  std::map<std::pair<RegionKind, AccessKind>, std::uint64_t> line_requests;
  DramStats dram;
  std::vector<DramStats> per_channel;
  std::vector<std::uint64_t> footprint_per_channel;  // payload bytes of the layout

  VertexValues final_values;

  std::uint64_t payload(RegionKind r, AccessKind k) const;
  std::uint64_t lines(RegionKind r, AccessKind k) const;
};

/// Runs one accelerator on `g` through a DRAM model with `cfg.channels`
/// channels. The request trace is written to `trace` when given.
RunResult simulate(const Graph& g, const AccelConfig& cfg, const DramConfig& dram, VertexId root,
                   std::ostream* trace = nullptr);

/// Graph as the accelerator sees it: weighted problems on unweighted input
/// get deterministic weights.
Graph prepare_graph(const Graph& g, const AccelConfig& cfg);

/// Scheme the accelerator's value propagation follows.
Scheme scheme_of(Accelerator a);

}  // namespace gsim
