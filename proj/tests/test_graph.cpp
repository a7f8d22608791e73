#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gsim/graph.hpp"
#include "test_util.hpp"

using namespace gsim;

TEST_CASE("edge list relabels ids in order of first appearance") {
  TempDir dir;
  auto path = dir.file("g.txt", "# comment\n10 20\n20 30\n% other comment\n10 30\n");
  Graph g = load_edge_list(path);
  CHECK(g.n == 3);
  REQUIRE(g.m() == 3);
  CHECK(g.edges[0] == Edge{0, 1, 0});
  CHECK(g.edges[1] == Edge{1, 2, 0});
  CHECK(g.labels == std::vector<std::uint64_t>{10, 20, 30});
  CHECK(vertex_by_label(g, 30) == VertexId{2});
  CHECK_FALSE(vertex_by_label(g, 11).has_value());
}

TEST_CASE("undirected lists store both directions") {
  TempDir dir;
  auto path = dir.file("u.txt", "1 2\n2 3\n");
  Graph g = load_edge_list(path, LoadOptions{false, false, "u"});
  CHECK_FALSE(g.directed);
  CHECK(g.m() == 4);
  CHECK(g.original_edge_count == 2);
}

TEST_CASE("weighted lists need a third column") {
  TempDir dir;
  auto good = dir.file("w.txt", "0 1 5\n1 2 7\n");
  Graph g = load_edge_list(good, LoadOptions{true, true, "w"});
  CHECK(g.weighted);
  CHECK(g.edges[1].weight == 7);
  auto bad = dir.file("b.txt", "0 1\n");
  CHECK_THROWS_AS(load_edge_list(bad, LoadOptions{true, true, "b"}), Error);
}

TEST_CASE("malformed lines are reported") {
  TempDir dir;
  CHECK_THROWS_AS(load_edge_list(dir.file("x.txt", "0 x\n")), Error);
  CHECK_THROWS_AS(load_edge_list(dir.path() / "missing.txt"), Error);
}

TEST_CASE("binary cache round-trips") {
  TempDir dir;
  Graph g = load_edge_list(dir.file("g.txt", "7 3\n3 9\n9 7\n7 9\n"));
  g = with_weights(g, 3);
  save_binary(g, dir.path() / "g.gsg");
  Graph h = load_binary(dir.path() / "g.gsg");
  CHECK(h.n == g.n);
  CHECK(h.edges == g.edges);
  CHECK(h.weighted);
  CHECK(h.labels == g.labels);
  CHECK(h.name == g.name);
  CHECK(h.original_edge_count == g.original_edge_count);

  std::ofstream(dir.path() / "junk.gsg") << "not a graph";
  CHECK_THROWS_AS(load_binary(dir.path() / "junk.gsg"), Error);
}

TEST_CASE("rmat has exact size and is deterministic") {
  Graph a = generate_rmat(8, 4, 42);
  Graph b = generate_rmat(8, 4, 42);
  Graph c = generate_rmat(8, 4, 43);
  CHECK(a.n == 256);
  CHECK(a.m() == 1024);
  CHECK(a.edges == b.edges);
  CHECK(a.edges != c.edges);
  for (const Edge& e : a.edges) {
    REQUIRE(e.src < a.n);
    REQUIRE(e.dst < a.n);
  }
  // power-law skew: the heaviest vertex has far more than the average degree
  auto deg = out_degrees(a);
  CHECK(*std::max_element(deg.begin(), deg.end()) > 4 * 4);
}

TEST_CASE("stats of a star") {
  Graph g;
  g.n = 5;
  for (VertexId v = 1; v < 5; ++v) g.edges.push_back({0, v, 0});
  g.original_edge_count = 4;
  GraphStats s = stats(g, true);
  CHECK(s.avg_degree == doctest::Approx(0.8));
  CHECK(s.skewness > 0.0);
  CHECK(s.degree_histogram.at(0) == 4);
  CHECK(s.degree_histogram.at(4) == 1);
  REQUIRE(s.diameter_estimate.has_value());
  CHECK(*s.diameter_estimate == 1);
}

TEST_CASE("weights are symmetric on undirected graphs") {
  TempDir dir;
  Graph g = load_edge_list(dir.file("u.txt", "1 2\n2 3\n3 1\n"), LoadOptions{false, false, "u"});
  Graph w = with_weights(g, 9);
  for (const Edge& e : w.edges) {
    CHECK(e.weight >= 1);
    CHECK(e.weight <= 64);
    auto it = std::find_if(w.edges.begin(), w.edges.end(),
                           [&](const Edge& f) { return f.src == e.dst && f.dst == e.src; });
    REQUIRE(it != w.edges.end());
    CHECK(it->weight == e.weight);
  }
}

TEST_CASE("root choice") {
  Graph g;
  g.n = 4;
  g.edges = {{1, 0, 0}, {1, 2, 0}, {3, 0, 0}, {3, 2, 0}};
  CHECK(choose_root(g) == 1);  // tie on degree 2, lowest id wins
  CHECK(default_root("sd").has_value());
  CHECK_FALSE(default_root("nope").has_value());
}

TEST_CASE("graph specs") {
  Graph g = resolve_graph(GraphSource{"rmat:6:2:1"});
  CHECK(g.n == 64);
  CHECK(g.m() == 128);
  CHECK_THROWS_AS(resolve_graph(GraphSource{"rmat:x"}), UsageError);
}
