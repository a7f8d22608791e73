#include "gsim/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace gsim {

std::string MetricRow::key() const {
  return accelerator + ',' + problem + ',' + graph + ',' + dram + ',' + std::to_string(channels) + ',' + optimizations;
}

MetricRow compute_metrics(const RunResult& run, const RunLabels& labels, const AccelConfig& cfg) {
  if (run.elapsed_ns <= 0.0) throw Error("degenerate run: zero elapsed time");
  MetricRow r;
  r.accelerator = std::string(to_string(run.which));
  r.problem = std::string(to_string(run.problem));
  r.graph = labels.graph;
  r.dram = labels.dram;
  r.channels = cfg.channels;
  r.optimizations = to_string(cfg.optimizations);
  r.n = run.n;
  r.m = run.original_edge_count;
  r.elapsed_ns = run.elapsed_ns;
  r.iterations = run.iterations;
  const double seconds = run.elapsed_ns * 1e-9;
  r.mteps = double(run.original_edge_count) / seconds / 1e6;
  r.mreps = double(run.edges_read_total) / seconds / 1e6;
  r.bytes_per_edge = run.original_edge_count ? double(run.total_bytes) / double(run.original_edge_count) : 0.0;
  r.edges_read = run.edges_read_total;
  r.values_read = std::accumulate(run.values_read_per_iteration.begin(), run.values_read_per_iteration.end(),
                                  std::uint64_t{0});
  const double iters = std::max(1u, run.iterations);
  r.edges_read_per_iteration = double(r.edges_read) / iters;
  r.values_read_per_iteration = double(r.values_read) / iters;
  r.updates_written = run.updates_written;
  r.requests = run.total_requests;
  r.bytes = run.total_bytes;
  r.row_hits = run.dram.row_hits;
  r.row_misses = run.dram.row_misses;
  r.row_conflicts = run.dram.row_conflicts;
  r.utilization = run.dram.utilization;
  return r;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "accelerator", "problem",   "graph",      "dram",         "channels",       "optimizations",
      "n",           "m",         "elapsed_ns", "iterations",   "mteps",          "mreps",
      "bytes_per_edge", "edges_read_per_iteration", "values_read_per_iteration", "edges_read", "values_read",
      "updates_written", "requests", "bytes",   "row_hits",     "row_misses",     "row_conflicts",
      "utilization"};
  return cols;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf.data(), p);
}

void write_csv_header(std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_csv_row(std::ostream& os, const MetricRow& r) {
  os << r.accelerator << ',' << r.problem << ',' << r.graph << ',' << r.dram << ',' << r.channels << ','
     << r.optimizations << ',' << r.n << ',' << r.m << ',' << format_double(r.elapsed_ns) << ',' << r.iterations << ','
     << format_double(r.mteps) << ',' << format_double(r.mreps) << ',' << format_double(r.bytes_per_edge) << ','
     << format_double(r.edges_read_per_iteration) << ',' << format_double(r.values_read_per_iteration) << ','
     << r.edges_read << ',' << r.values_read << ',' << r.updates_written << ',' << r.requests << ',' << r.bytes << ','
     << r.row_hits << ',' << r.row_misses << ',' << r.row_conflicts << ',' << format_double(r.utilization) << '\n';
}

void write_csv(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
  if (!os) throw Error("write failed: " + path.string());
}

namespace {

template <typename T>
T parse_num(const std::string& s, const std::string& what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw Error("bad " + what + " field: " + s);
  return v;
}

}  // namespace

std::vector<MetricRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<MetricRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  std::ostringstream header;
  write_csv_header(header);
  if (line + '\n' != header.str()) throw Error(path.string() + ": unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != csv_columns().size()) throw Error(path.string() + ": wrong field count");
    MetricRow r;
    std::size_t i = 0;
    r.accelerator = f[i++];
    r.problem = f[i++];
    r.graph = f[i++];
    r.dram = f[i++];
    r.channels = parse_num<std::uint32_t>(f[i++], "channels");
    r.optimizations = f[i++];
    r.n = parse_num<std::uint32_t>(f[i++], "n");
    r.m = parse_num<std::uint64_t>(f[i++], "m");
    r.elapsed_ns = parse_num<double>(f[i++], "elapsed_ns");
    r.iterations = parse_num<unsigned>(f[i++], "iterations");
    r.mteps = parse_num<double>(f[i++], "mteps");
    r.mreps = parse_num<double>(f[i++], "mreps");
    r.bytes_per_edge = parse_num<double>(f[i++], "bytes_per_edge");
    r.edges_read_per_iteration = parse_num<double>(f[i++], "edges_read_per_iteration");
    r.values_read_per_iteration = parse_num<double>(f[i++], "values_read_per_iteration");
    r.edges_read = parse_num<std::uint64_t>(f[i++], "edges_read");
    r.values_read = parse_num<std::uint64_t>(f[i++], "values_read");
    r.updates_written = parse_num<std::uint64_t>(f[i++], "updates_written");
    r.requests = parse_num<std::uint64_t>(f[i++], "requests");
    r.bytes = parse_num<std::uint64_t>(f[i++], "bytes");
    r.row_hits = parse_num<std::uint64_t>(f[i++], "row_hits");
    r.row_misses = parse_num<std::uint64_t>(f[i++], "row_misses");
    r.row_conflicts = parse_num<std::uint64_t>(f[i++], "row_conflicts");
    r.utilization = parse_num<double>(f[i++], "utilization");
    rows.push_back(std::move(r));
  }
  return rows;
}

double speedup(const MetricRow& base, const MetricRow& x) {
  if (x.elapsed_ns <= 0.0) throw Error("speedup over a zero-time run");
  return base.elapsed_ns / x.elapsed_ns;
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void print_table(std::ostream& os, const std::string& title, const std::vector<std::vector<std::string>>& cells) {
  os << title << '\n';
  if (cells.empty()) {
    os << "  (no rows)\n\n";
    return;
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : cells) {
    os << ' ';
    for (std::size_t c = 0; c < row.size(); ++c) os << ' ' << std::setw(static_cast<int>(width[c])) << row[c];
    os << '\n';
  }
  os << '\n';
}

// Rows that differ from `r` only in the field picked by `select`.
template <typename Key>
const MetricRow* find_base(const std::vector<MetricRow>& rows, const MetricRow& r, Key key) {
  for (const auto& b : rows) {
    if (key(b, r)) return &b;
  }
  return nullptr;
}

}  // namespace

void write_summary(const std::vector<MetricRow>& rows, std::ostream& os) {
  {
    std::vector<std::vector<std::string>> t{{"graph", "problem", "accelerator", "dram", "ch", "opt", "time_ms",
                                             "iters", "MTEPS", "B/edge"}};
    std::vector<const MetricRow*> sorted;
    for (const auto& r : rows) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(), [](const MetricRow* a, const MetricRow* b) {
      return std::tie(a->graph, a->problem) < std::tie(b->graph, b->problem);
    });
    for (const MetricRow* r : sorted) {
      t.push_back({r->graph, r->problem, r->accelerator, r->dram, std::to_string(r->channels), r->optimizations,
                   fixed(r->elapsed_ns / 1e6, 4), std::to_string(r->iterations), fixed(r->mteps, 1),
                   fixed(r->bytes_per_edge, 2)});
    }
    print_table(os, "Runtime by graph", t);
  }
  auto same_but = [](const MetricRow& a, const MetricRow& b, int skip) {
    return a.accelerator == b.accelerator && a.problem == b.problem && a.graph == b.graph &&
           (skip == 0 || a.dram == b.dram) && (skip == 1 || a.channels == b.channels) &&
           (skip == 2 || a.optimizations == b.optimizations);
  };
  {
    std::vector<std::vector<std::string>> t{{"graph", "problem", "accelerator", "dram", "ch", "speedup"}};
    for (const auto& r : rows) {
      if (r.dram == "ddr4") continue;
      const MetricRow* b = find_base(rows, r, [&](const MetricRow& x, const MetricRow& y) {
        return x.dram == "ddr4" && same_but(x, y, 0);
      });
      if (b) t.push_back({r.graph, r.problem, r.accelerator, r.dram, std::to_string(r.channels), fixed(speedup(*b, r), 3)});
    }
    print_table(os, "Speedup over DDR4", t);
  }
  {
    std::vector<std::vector<std::string>> t{{"graph", "problem", "accelerator", "dram", "ch", "speedup"}};
    for (const auto& r : rows) {
      if (r.channels == 1) continue;
      const MetricRow* b = find_base(rows, r, [&](const MetricRow& x, const MetricRow& y) {
        return x.channels == 1 && same_but(x, y, 1);
      });
      if (b) t.push_back({r.graph, r.problem, r.accelerator, r.dram, std::to_string(r.channels), fixed(speedup(*b, r), 3)});
    }
    print_table(os, "Speedup over one channel", t);
  }
  {
    std::vector<std::vector<std::string>> t{{"graph", "problem", "accelerator", "opt", "speedup"}};
    for (const auto& r : rows) {
      if (r.optimizations == "none") continue;
      const MetricRow* b = find_base(rows, r, [&](const MetricRow& x, const MetricRow& y) {
        return x.optimizations == "none" && same_but(x, y, 2);
      });
      if (b) t.push_back({r.graph, r.problem, r.accelerator, r.optimizations, fixed(speedup(*b, r), 3)});
    }
    print_table(os, "Speedup over no optimizations", t);
  }
  {
    std::vector<std::vector<std::string>> t{{"avg_degree", "graph", "problem", "accelerator", "MREPS"}};
    std::vector<const MetricRow*> sorted;
    for (const auto& r : rows) sorted.push_back(&r);
    auto deg = [](const MetricRow* r) { return r->n ? double(r->m) / r->n : 0.0; };
    std::stable_sort(sorted.begin(), sorted.end(), [&](const MetricRow* a, const MetricRow* b) { return deg(a) < deg(b); });
    for (const MetricRow* r : sorted) {
      t.push_back({fixed(deg(r), 2), r->graph, r->problem, r->accelerator, fixed(r->mreps, 1)});
    }
    print_table(os, "MREPS by average degree", t);
  }
}

TraceCounters counters_from_trace(const std::vector<TraceRecord>& trace) {
  TraceCounters c;
  for (const auto& t : trace) {
    ++c.requests;
    c.bytes += kLineBytes;
    switch (t.outcome) {
      case RowOutcome::Hit: ++c.row_hits; break;
      case RowOutcome::Miss: ++c.row_misses; break;
      case RowOutcome::Conflict: ++c.row_conflicts; break;
      case RowOutcome::Unknown: break;
    }
    if (t.region == RegionKind::Edges) c.edge_payload += t.payload;
    if (t.region == RegionKind::Values) c.value_payload += t.payload;
  }
  return c;
}

}  // namespace gsim
