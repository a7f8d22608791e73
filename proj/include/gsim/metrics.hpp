#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsim/accelerator.hpp"
#include "gsim/dram.hpp"

namespace gsim {

struct MetricRow {
  std::string accelerator;
  std::string problem;
  std::string graph;
  std::string dram;
  std::uint32_t channels = 1;
  std::string optimizations = "none";
  std::uint32_t n = 0;
  std::uint64_t m = 0;  // original edge count
  double elapsed_ns = 0.0;
  unsigned iterations = 0;
  double mteps = 0.0;
  double mreps = 0.0;
  double bytes_per_edge = 0.0;
  double edges_read_per_iteration = 0.0;
  double values_read_per_iteration = 0.0;
  std::uint64_t edges_read = 0;
  std::uint64_t values_read = 0;
  std::uint64_t updates_written = 0;
  std::uint64_t requests = 0;
  std::uint64_t bytes = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t row_conflicts = 0;
  double utilization = 0.0;

  /// Identifies the run configuration (everything before the measurements).
  std::string key() const;
};

struct RunLabels {
  std::string graph;
  std::string dram;
};

/// Throws Error for a degenerate run (zero elapsed time).
MetricRow compute_metrics(const RunResult& run, const RunLabels& labels, const AccelConfig& cfg);

const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const MetricRow& row);
void write_csv(const std::vector<MetricRow>& rows, const std::filesystem::path& path);
std::vector<MetricRow> read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form; used for every floating-point field.
std::string format_double(double v);

/// elapsed(base) / elapsed(x).
double speedup(const MetricRow& base, const MetricRow& x);

/// Plain-text tables: runtime per graph, speedup over DDR4, over one
/// channel, over no optimizations, and MREPS by average degree.
void write_summary(const std::vector<MetricRow>& rows, std::ostream& os);

/// Byte and row-buffer counters recomputed from a request trace.
struct TraceCounters {
  std::uint64_t requests = 0;
  std::uint64_t bytes = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t row_conflicts = 0;
  std::uint64_t edge_payload = 0;
  std::uint64_t value_payload = 0;
};
TraceCounters counters_from_trace(const std::vector<TraceRecord>& trace);

}  // namespace gsim
