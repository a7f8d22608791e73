#include <doctest.h>

#include "gsim/algorithms.hpp"
#include "test_util.hpp"

using namespace gsim;

TEST_CASE("problem names") {
  CHECK(parse_problem("bfs") == Problem::BFS);
  CHECK(parse_problem("PageRank") == Problem::PR);
  CHECK(parse_problem("SpMV") == Problem::SpMV);
  CHECK_THROWS_AS(parse_problem("tc"), UsageError);
  CHECK(to_string(Problem::WCC) == "WCC");
}

TEST_CASE("problem specs") {
  auto pr = make_problem(Problem::PR);
  CHECK(pr.reduction == Reduction::Sum);
  CHECK(pr.fixed_iterations == 1u);
  CHECK(make_problem(Problem::SSSP).weighted);
  CHECK_FALSE(make_problem(Problem::BFS).weighted);
  CHECK(needs_root(Problem::SSSP));
  CHECK_FALSE(needs_root(Problem::WCC));
}

TEST_CASE("update and apply") {
  auto bfs = make_problem(Problem::BFS);
  CHECK(edge_update(bfs, 3, 0, 1) == 4);
  CHECK(edge_update(bfs, kUnreached, 0, 1) == kUnreached);
  CHECK(apply(bfs, 5, 7, 10).changed);
  CHECK_FALSE(apply(bfs, 7, 7, 10).changed);
  auto sssp = make_problem(Problem::SSSP);
  CHECK(edge_update(sssp, 3, 9, 1) == 12);
  auto pr = make_problem(Problem::PR);
  CHECK(edge_update(pr, 0.5, 0, 4) == 0.125);
  CHECK(apply(pr, 0.0, 1.0, 4).value == doctest::Approx(0.15 / 4));
}

TEST_CASE("path graph pass counts per scheme") {
  Graph g = path_graph(4);
  auto bfs = make_problem(Problem::BFS);
  auto imm = reference_run(bfs, g, 0, Scheme::ImmediateAsc);
  auto two = reference_run(bfs, g, 0, Scheme::TwoPhase);
  auto lvl = reference_run(bfs, g, 0, Scheme::LevelSync);
  VertexValues expect{0, 1, 2, 3};
  CHECK(imm.values == expect);
  CHECK(two.values == expect);
  CHECK(lvl.values == expect);
  CHECK(imm.iterations == 2);
  CHECK(two.iterations == 4);
}

TEST_CASE("wcc labels are minimum ids of reaching vertices") {
  Graph g = make_graph(5, {{1, 0}, {0, 1}, {3, 4}, {4, 3}, {2, 2}});
  auto r = reference_run(make_problem(Problem::WCC), g, 0, Scheme::TwoPhase);
  CHECK(r.values == VertexValues{0, 0, 2, 3, 3});
}

TEST_CASE("pagerank is a single pass") {
  Graph g = make_graph(3, {{0, 1}, {0, 2}, {1, 2}});
  auto r = reference_run(make_problem(Problem::PR), g, 0, Scheme::ImmediateAsc);
  CHECK(r.iterations == 1);
  const double base = 0.15 / 3;
  CHECK(r.values[0] == doctest::Approx(base));
  CHECK(r.values[1] == doctest::Approx(base + 0.85 * (1.0 / 3) / 2));
  CHECK(r.values[2] == doctest::Approx(base + 0.85 * ((1.0 / 3) / 2 + 1.0 / 3)));
}

TEST_CASE("root out of range") {
  CHECK_THROWS_AS(init_values(make_problem(Problem::BFS), path_graph(3), 3), Error);
}
