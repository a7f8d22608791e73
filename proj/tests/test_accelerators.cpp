#include <doctest.h>

#include <sstream>

#include "gsim/accelerator.hpp"
#include "test_util.hpp"

using namespace gsim;

namespace {

RunResult run(const Graph& g, Accelerator a, Problem p, std::uint32_t channels = 1, std::string_view opt = "none",
              VertexId root = 0, std::uint32_t interval = 0) {
  AccelConfig cfg = make_accel_config(a, p, channels, parse_optimizations(opt, a));
  cfg.interval_size = interval;
  return simulate(g, cfg, dram_preset("ddr4"), root);
}

Graph in_star(std::uint32_t leaves) {
  std::vector<std::pair<VertexId, VertexId>> e;
  for (VertexId v = 1; v <= leaves; ++v) e.push_back({v, 0});
  return make_graph(leaves + 1, e, "instar");
}

Graph two_cliques() {
  std::vector<std::pair<VertexId, VertexId>> e;
  for (VertexId base : {0u, 4u}) {
    for (VertexId a = 0; a < 4; ++a) {
      for (VertexId b = 0; b < 4; ++b) {
        if (a != b) e.push_back({base + a, base + b});
      }
    }
  }
  return make_graph(8, e, "cliques");
}

}  // namespace

TEST_CASE("accelerator names and optimization sets") {
  CHECK(parse_accelerator("hitgraph") == Accelerator::HitGraph);
  CHECK_THROWS_AS(parse_accelerator("graphicionado"), UsageError);
  auto s = parse_optimizations("update_filter+partition_skip", Accelerator::HitGraph);
  CHECK(s.has(Optimization::UpdateFilter));
  CHECK(s.has(Optimization::PartitionSkip));
  CHECK_FALSE(s.has(Optimization::DstSort));
  CHECK(to_string(s) == "partition_skip+update_filter");
  CHECK(parse_optimizations("all", Accelerator::ThunderGP) == OptimizationSet{}.add(Optimization::ChunkSchedule));
  CHECK(parse_optimizations("none", Accelerator::AccuGraph).empty());
  CHECK_THROWS_AS(
      make_accel_config(Accelerator::HitGraph, Problem::BFS, 1, parse_optimizations("chunk_schedule", Accelerator::HitGraph))
          .validate(),
      UsageError);
  CHECK_THROWS_AS(parse_optimizations("warp_speed", Accelerator::HitGraph), UsageError);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(make_accel_config(Accelerator::AccuGraph, Problem::SSSP).validate(), UsageError);
  CHECK_THROWS_AS(make_accel_config(Accelerator::ForeGraph, Problem::SpMV).validate(), UsageError);
  CHECK_THROWS_AS(make_accel_config(Accelerator::ForeGraph, Problem::BFS, 2).validate(), UsageError);
  CHECK_NOTHROW(make_accel_config(Accelerator::HitGraph, Problem::SpMV, 4).validate());
  AccelConfig c = make_accel_config(Accelerator::ThunderGP, Problem::BFS, 2);
  c.p = 1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK(make_accel_config(Accelerator::ForeGraph, Problem::BFS).p == 4);
  CHECK(make_accel_config(Accelerator::ThunderGP, Problem::BFS).effective_clock_mhz() == 250.0);
  CHECK(make_accel_config(Accelerator::AccuGraph, Problem::BFS).effective_clock_mhz() == 200.0);
}

TEST_CASE("interval sizes follow the on-chip budget") {
  AccelConfig c = make_accel_config(Accelerator::HitGraph, Problem::BFS, 2);
  CHECK(derive_interval_size(c, 1000) == 500);
  CHECK(derive_interval_size(c, 600000) == 100000);  // k = 3 per PE
  c.interval_size = 77;
  CHECK(derive_interval_size(c, 1000) == 77);
  AccelConfig f = make_accel_config(Accelerator::ForeGraph, Problem::BFS);
  CHECK(derive_interval_size(f, 1'000'000) == 62500);  // 16 intervals
  CHECK(derive_interval_size(f, 65536) == 65536);
  AccelConfig a = make_accel_config(Accelerator::AccuGraph, Problem::BFS);
  CHECK(derive_interval_size(a, 1'024'000) == 1'024'000);
  CHECK(derive_interval_size(a, 1'024'001) == 512'001);
}

TEST_CASE("AccuGraph BFS on a path") {
  RunResult r = run(path_graph(4), Accelerator::AccuGraph, Problem::BFS);
  CHECK(r.final_values == VertexValues{0, 1, 2, 3});
  CHECK(r.iterations == 2);
}

TEST_CASE("HitGraph BFS on a path") {
  RunResult r = run(path_graph(4), Accelerator::HitGraph, Problem::BFS);
  CHECK(r.final_values == VertexValues{0, 1, 2, 3});
  CHECK(r.iterations == 4);
}

TEST_CASE("ThunderGP BFS on a path") {
  Graph g = path_graph(4);
  RunResult r = run(g, Accelerator::ThunderGP, Problem::BFS);
  auto ref = reference_run(make_problem(Problem::BFS), g, 0, Scheme::TwoPhase);
  CHECK(r.final_values == ref.values);
  CHECK(r.iterations == ref.iterations);
}

TEST_CASE("ForeGraph WCC on two cliques") {
  RunResult r = run(two_cliques(), Accelerator::ForeGraph, Problem::WCC);
  CHECK(r.final_values == VertexValues{0, 0, 0, 0, 4, 4, 4, 4});
}

TEST_CASE("PageRank runs one iteration everywhere") {
  Graph g = generate_rmat(6, 4, 3);
  for (Accelerator a : {Accelerator::AccuGraph, Accelerator::ForeGraph, Accelerator::HitGraph, Accelerator::ThunderGP}) {
    CHECK(run(g, a, Problem::PR).iterations == 1);
  }
}

TEST_CASE("update combining on an in-star") {
  Graph g = in_star(8);
  RunResult plain = run(g, Accelerator::HitGraph, Problem::WCC);
  RunResult combined = run(g, Accelerator::HitGraph, Problem::WCC, 1, "update_combine");
  CHECK(plain.final_values == combined.final_values);
  CHECK(plain.updates_written == 8u * plain.iterations);
  CHECK(combined.updates_written == combined.iterations);
}

TEST_CASE("ThunderGP writes applied values to every channel") {
  Graph g = generate_rmat(8, 4, 2);
  for (std::uint32_t c : {1u, 2u, 4u}) {
    RunResult r = run(g, Accelerator::ThunderGP, Problem::WCC, c);
    CHECK(r.payload(RegionKind::Values, AccessKind::Write) == std::uint64_t{c} * g.n * 4 * r.iterations);
    REQUIRE(r.footprint_per_channel.size() == c);
  }
}

TEST_CASE("weighted HitGraph edges are 12 bytes") {
  Graph g = generate_rmat(7, 4, 4);
  RunResult r = run(g, Accelerator::HitGraph, Problem::SSSP, 1, "none", choose_root(g));
  CHECK(r.payload(RegionKind::Edges, AccessKind::Read) == 12 * g.m() * r.iterations);
}

TEST_CASE("ForeGraph shard skipping drops untouched shards") {
  // interval 1 never changes after the first pass
  Graph g = make_graph(8, {{0, 1}, {1, 2}, {2, 3}, {4, 5}, {5, 6}});
  RunResult plain = run(g, Accelerator::ForeGraph, Problem::BFS, 1, "none", 0, 4);
  RunResult skip = run(g, Accelerator::ForeGraph, Problem::BFS, 1, "shard_skip", 0, 4);
  CHECK(plain.final_values == skip.final_values);
  CHECK(skip.total_requests < plain.total_requests);
}

TEST_CASE("stride mapping keeps results in original ids") {
  Graph g = generate_rmat(7, 4, 8);
  const VertexId root = choose_root(g);
  RunResult a = run(g, Accelerator::ForeGraph, Problem::BFS, 1, "none", root, 32);
  RunResult b = run(g, Accelerator::ForeGraph, Problem::BFS, 1, "stride_map", root, 32);
  CHECK(a.final_values == b.final_values);
}

TEST_CASE("unsupported runs") {
  Graph g = path_graph(3);
  CHECK_THROWS_AS(run(g, Accelerator::AccuGraph, Problem::SSSP), UsageError);
  CHECK_THROWS_AS(run(g, Accelerator::HitGraph, Problem::BFS, 1, "none", 9), UsageError);
}

TEST_CASE("trace matches run statistics") {
  Graph g = generate_rmat(6, 4, 1);
  AccelConfig cfg = make_accel_config(Accelerator::HitGraph, Problem::BFS, 2);
  std::ostringstream trace;
  RunResult r = simulate(g, cfg, dram_preset("ddr4"), choose_root(g), &trace);
  std::istringstream in(trace.str());
  std::string line;
  std::uint64_t rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("seq,", 0) == 0);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.total_requests);
}
