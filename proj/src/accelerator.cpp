#include "gsim/accelerator.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "model_base.hpp"

namespace gsim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::uint32_t ceil_div(std::uint64_t a, std::uint64_t b) { return static_cast<std::uint32_t>((a + b - 1) / b); }

}  // namespace

std::string_view to_string(Accelerator a) {
  switch (a) {
    case Accelerator::AccuGraph: return "AccuGraph";
    case Accelerator::ForeGraph: return "ForeGraph";
    case Accelerator::HitGraph: return "HitGraph";
    case Accelerator::ThunderGP: return "ThunderGP";
  }
  return "?";
}

Accelerator parse_accelerator(std::string_view s) {
  const std::string l = lower(s);
  if (l == "accugraph") return Accelerator::AccuGraph;
  if (l == "foregraph") return Accelerator::ForeGraph;
  if (l == "hitgraph") return Accelerator::HitGraph;
  if (l == "thundergp") return Accelerator::ThunderGP;
  throw UsageError("unknown accelerator: " + std::string(s));
}

std::string_view to_string(Optimization o) {
  switch (o) {
    case Optimization::PrefetchSkip: return "prefetch_skip";
    case Optimization::PartitionSkip: return "partition_skip";
    case Optimization::ShardSkip: return "shard_skip";
    case Optimization::EdgeShuffle: return "edge_shuffle";
    case Optimization::StrideMap: return "stride_map";
    case Optimization::DstSort: return "dst_sort";
    case Optimization::UpdateCombine: return "update_combine";
    case Optimization::UpdateFilter: return "update_filter";
    case Optimization::ChunkSchedule: return "chunk_schedule";
  }
  return "?";
}

bool applies_to(Optimization o, Accelerator a) {
  switch (o) {
    case Optimization::PrefetchSkip: return a == Accelerator::AccuGraph;
    case Optimization::PartitionSkip: return a == Accelerator::AccuGraph || a == Accelerator::HitGraph;
    case Optimization::ShardSkip:
    case Optimization::EdgeShuffle:
    case Optimization::StrideMap: return a == Accelerator::ForeGraph;
    case Optimization::DstSort:
    case Optimization::UpdateCombine:
    case Optimization::UpdateFilter: return a == Accelerator::HitGraph;
    case Optimization::ChunkSchedule: return a == Accelerator::ThunderGP;
  }
  return false;
}

OptimizationSet OptimizationSet::all(Accelerator a) {
  OptimizationSet s;
  for (unsigned i = 0; i < kOptimizationCount; ++i) {
    auto o = static_cast<Optimization>(i);
    if (applies_to(o, a)) s.add(o);
  }
  return s;
}

OptimizationSet parse_optimizations(std::string_view text, Accelerator a) {
  const std::string t = lower(text);
  if (t.empty() || t == "none") return {};
  if (t == "all") return OptimizationSet::all(a);
  OptimizationSet s;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    std::size_t end = t.find_first_of("+,", pos);
    if (end == std::string::npos) end = t.size();
    std::string item = t.substr(pos, end - pos);
    bool found = false;
    for (unsigned i = 0; i < kOptimizationCount && !found; ++i) {
      auto o = static_cast<Optimization>(i);
      if (item == to_string(o)) {
        s.add(o);
        found = true;
      }
    }
    if (!found) throw UsageError("unknown optimization: " + item);
    pos = end + 1;
  }
  return s;
}

std::string to_string(OptimizationSet s) {
  if (s.empty()) return "none";
  std::string out;
  for (unsigned i = 0; i < kOptimizationCount; ++i) {
    auto o = static_cast<Optimization>(i);
    if (!s.has(o)) continue;
    if (!out.empty()) out += '+';
    out += to_string(o);
  }
  return out;
}

double AccelConfig::effective_clock_mhz() const {
  if (clock_mhz > 0.0) return clock_mhz;
  return which == Accelerator::ThunderGP ? 250.0 : 200.0;
}

void AccelConfig::validate() const {
  auto fail = [&](const std::string& why) { throw UsageError(std::string(to_string(which)) + ": " + why); };
  const Problem pr = problem.problem;
  const bool single = which == Accelerator::AccuGraph || which == Accelerator::ForeGraph;
  if (single && (pr == Problem::SSSP || pr == Problem::SpMV)) {
    fail(std::string(to_string(pr)) + " is not supported");
  }
  if (single && channels != 1) fail("only single-channel operation is supported");
  if (channels == 0 || p == 0) fail("channels and PEs must be positive");
  if (!single && p != channels) fail("PE count must equal the channel count");
  if (which == Accelerator::AccuGraph && p != 1) fail("has a single PE");
  for (unsigned i = 0; i < kOptimizationCount; ++i) {
    auto o = static_cast<Optimization>(i);
    if (optimizations.has(o) && !applies_to(o, which)) fail("optimization " + std::string(to_string(o)) + " does not apply");
  }
  if (bram_budget_bytes < 2ull * kValueBytes * p) fail("BRAM budget too small");
  if (pipeline_width == 0) fail("pipeline width must be positive");
  if (source_buffer_entries == 0) fail("source buffer must hold at least one entry");
  if (which == Accelerator::ForeGraph && interval_size > kMaxShardInterval) fail("interval exceeds 16-bit local ids");
}

AccelConfig make_accel_config(Accelerator which, Problem problem, std::uint32_t channels,
                              OptimizationSet optimizations) {
  AccelConfig c;
  c.which = which;
  c.problem = make_problem(problem);
  c.channels = channels;
  c.optimizations = optimizations;
  switch (which) {
    case Accelerator::AccuGraph: c.p = 1; break;
    case Accelerator::ForeGraph: c.p = 4; break;
    case Accelerator::HitGraph:
    case Accelerator::ThunderGP: c.p = channels; break;
  }
  return c;
}

std::uint32_t derive_interval_size(const AccelConfig& cfg, std::uint32_t n) {
  if (n == 0) return 1;
  if (cfg.interval_size > 0) return std::min(cfg.interval_size, n);
  const std::uint64_t bram_vertices = std::max<std::uint64_t>(cfg.bram_budget_bytes / kValueBytes, 1);
  switch (cfg.which) {
    case Accelerator::AccuGraph: {
      std::uint32_t k = ceil_div(n, kAccuGraphInterval);
      return ceil_div(n, k);
    }
    case Accelerator::ThunderGP: {
      std::uint32_t k = ceil_div(n, bram_vertices);
      return ceil_div(n, k);
    }
    case Accelerator::ForeGraph: {
      std::uint32_t k = ceil_div(n, kMaxShardInterval);
      return ceil_div(n, k);
    }
    case Accelerator::HitGraph: {
      std::uint32_t k = ceil_div(n, bram_vertices);
      return std::max<std::uint32_t>(ceil_div(n, std::uint64_t{k} * cfg.p), 1);
    }
  }
  return n;
}

Scheme scheme_of(Accelerator a) {
  return a == Accelerator::AccuGraph || a == Accelerator::ForeGraph ? Scheme::ImmediateAsc : Scheme::TwoPhase;
}

Graph prepare_graph(const Graph& g, const AccelConfig& cfg) {
  if (cfg.problem.weighted && !g.weighted) return with_weights(g, cfg.weight_seed);
  if (!cfg.problem.weighted && g.weighted) {
    Graph out = g;
    out.weighted = false;
    for (Edge& e : out.edges) e.weight = 1;
    return out;
  }
  return g;
}

std::uint64_t RunResult::payload(RegionKind r, AccessKind k) const {
  auto it = payload_bytes.find({r, k});
  return it == payload_bytes.end() ? 0 : it->second;
}

std::uint64_t RunResult::lines(RegionKind r, AccessKind k) const {
  auto it = line_requests.find({r, k});
  return it == line_requests.end() ? 0 : it->second;
}

RunResult simulate(const Graph& input, const AccelConfig& cfg, const DramConfig& dram_config, VertexId root,
                   std::ostream* trace) {
  cfg.validate();
  Graph g = prepare_graph(input, cfg);
  if (g.n == 0) throw Error("graph has no vertices");
  if (needs_root(cfg.problem.problem) && root >= g.n) {
    throw UsageError("root " + std::to_string(root) + " out of range (n = " + std::to_string(g.n) + ")");
  }
  const std::uint32_t interval = derive_interval_size(cfg, g.n);

  DramConfig dc = dram_config;
  dc.channels = cfg.channels;
  dc.validate();
  Dram dram(dc);

  std::optional<StrideMapping> mapping;
  const Graph* run_graph = &g;
  VertexId run_root = root;
  std::unique_ptr<detail::ModelBase> model;
  switch (cfg.which) {
    case Accelerator::AccuGraph: model = detail::make_accugraph(g, cfg, root, interval); break;
    case Accelerator::ForeGraph:
      if (cfg.optimizations.has(Optimization::StrideMap)) {
        mapping = stride_map(g, interval_count(g.n, interval));
        run_graph = &mapping->graph;
        run_root = needs_root(cfg.problem.problem) ? mapping->new_id[root] : 0;
      }
      model = detail::make_foregraph(*run_graph, cfg, run_root, interval);
      break;
    case Accelerator::HitGraph: model = detail::make_hitgraph(g, cfg, root, interval); break;
    case Accelerator::ThunderGP: model = detail::make_thundergp(g, cfg, root, interval); break;
  }

  RunOptions options;
  options.accel_mhz = cfg.effective_clock_mhz();
  options.stall_budget = cfg.stall_budget;
  options.trace = trace;
  LoopResult loop = run(*model, dram, options);

  RunResult r;
  r.which = cfg.which;
  r.problem = cfg.problem.problem;
  r.n = g.n;
  r.m = g.m();
  r.original_edge_count = g.original_edge_count;
  r.interval_size = interval;
  r.partitions = interval_count(g.n, interval);
  r.elapsed_ns = loop.elapsed_ns;
  r.iterations = model->iterations();
  r.edges_read_per_iteration = model->edges_read();
  r.values_read_per_iteration = model->values_read();
  r.edges_read_per_iteration.resize(r.iterations, 0);
  r.values_read_per_iteration.resize(r.iterations, 0);
  for (auto e : r.edges_read_per_iteration) r.edges_read_total += e;
  r.updates_written = model->updates_written();
  r.total_requests = loop.requests;
  r.total_bytes = loop.requests * kLineBytes;
  r.payload_bytes = loop.payload_bytes;
  r.line_requests = loop.line_requests;
  r.dram = loop.dram;
  r.per_channel = loop.per_channel;
  r.footprint_per_channel = model->footprint();
  r.final_values = mapping ? unmap_values(model->values(), mapping->new_id) : model->values();
  if (r.elapsed_ns > 0.0) {
    const double seconds = r.elapsed_ns * 1e-9;
    r.mteps = double(r.original_edge_count) / seconds / 1e6;
    r.mreps = double(r.edges_read_total) / seconds / 1e6;
  }
  r.bytes_per_edge = r.original_edge_count ? double(r.total_bytes) / double(r.original_edge_count) : 0.0;
  return r;
}

}  // namespace gsim
