#include <doctest.h>

#include <numeric>
#include <set>

#include "gsim/partition.hpp"
#include "test_util.hpp"

using namespace gsim;

TEST_CASE("memory map aligns regions to lines") {
  MemoryMap m(2);
  CHECK(m.allocate(0, "a", RegionKind::Values, 10) == 0);
  CHECK(m.allocate(0, "b", RegionKind::Edges, 100) == 64);
  CHECK(m.allocate(1, "c", RegionKind::Values, 64) == 0);
  CHECK(m.total_bytes(0) == 192);
  CHECK(m.payload_bytes(0) == 110);
  CHECK(m.payload_bytes(1) == 64);
}

TEST_CASE("horizontal csr splits in-neighbors by source interval") {
  // 0->2, 1->2, 3->2, 2->0
  Graph g = make_graph(4, {{0, 2}, {1, 2}, {3, 2}, {2, 0}});
  CsrLayout l = horizontal_csr(g, 2);
  REQUIRE(l.partitions.size() == 2);
  const auto& p0 = l.partitions[0];
  const auto& p1 = l.partitions[1];
  CHECK(p0.pointers.size() == 5);
  CHECK(p0.pointers == std::vector<std::uint32_t>{0, 0, 0, 2, 2});
  CHECK(p0.neighbors == std::vector<VertexId>{0, 1});
  CHECK(p1.pointers == std::vector<std::uint32_t>{0, 1, 1, 2, 2});
  CHECK(p1.neighbors == std::vector<VertexId>{2, 3});
  std::uint64_t total = 0;
  for (const auto& p : l.partitions) total += p.neighbors.size();
  CHECK(total == g.m());
}

TEST_CASE("horizontal edge list deals partitions to channels") {
  Graph g = make_graph(8, {{0, 7}, {2, 1}, {3, 5}, {5, 0}, {7, 7}, {1, 6}});
  EdgeListLayout l = horizontal_edge_list(g, 2, 2);
  REQUIRE(l.partitions.size() == 4);
  std::uint64_t sum = 0;
  for (std::uint32_t i = 0; i < 4; ++i) {
    CHECK(l.partitions[i].info.channel == i % 2);
    for (const Edge& e : l.partitions[i].edges) CHECK(l.partition_of(e.src) == i);
    sum += l.partitions[i].edges.size();
  }
  CHECK(sum == g.m());
  EdgeListLayout s = sort_by_destination(l);
  CHECK(s.sorted_by_destination);
  CHECK(s.partitions[0].edges[0].dst == 6);
  CHECK(s.partitions[0].edges[1].dst == 7);
}

TEST_CASE("vertical chunks balance channels") {
  Graph g = generate_rmat(8, 4, 5);
  for (std::uint32_t p : {1u, 2u, 4u}) {
    VerticalLayout l = vertical_edge_list(g, 64, p);
    std::vector<std::uint64_t> per(p, 0);
    for (const Chunk& c : l.chunks) {
      per[c.channel] += c.edges.size();
      for (std::size_t i = 1; i < c.edges.size(); ++i) CHECK(c.edges[i - 1].src <= c.edges[i].src);
      for (const Edge& e : c.edges) CHECK(e.dst / 64 == c.partition);
    }
    for (auto x : per) CHECK(x == g.m() / p);
    for (std::uint32_t c = 0; c < p; ++c) {
      CHECK(l.memory.payload_bytes(c) == std::uint64_t{g.n} * 4 * 2 + g.m() / p * 8);
    }
  }
}

TEST_CASE("lpt assignment") {
  auto a = lpt_assign({5, 3, 3, 2, 1}, 2);
  CHECK(a == std::vector<std::uint32_t>{0, 1, 1, 0, 1});
  CHECK_THROWS_AS(lpt_assign({1}, 0), Error);
}

TEST_CASE("interval shard grid") {
  Graph g = make_graph(4, {{0, 3}, {1, 0}, {2, 2}, {3, 1}, {3, 0}});
  ShardLayout l = interval_shard(g, 2, 1);
  CHECK(l.intervals.size() == 2);
  // shards (0,0) (0,1) (1,0) (1,1), all non-empty
  REQUIRE(l.lists.size() == 4);
  CHECK(l.lists[0].records.size() == 1);
  CHECK(l.lists[0].records[0].src == 1);
  CHECK(l.lists[0].records[0].dst == 0);
  CHECK(l.lists[2].records.size() == 2);
  CHECK(l.stored_edges() == 5);
  CHECK(l.real_edges() == 5);
}

TEST_CASE("shuffling pads shorter lanes") {
  // interval 0 sends 3 edges to interval 0 and 1 edge to interval 1
  Graph g = make_graph(4, {{0, 0}, {0, 1}, {1, 0}, {1, 3}});
  ShardLayout s = shuffle_edges(interval_shard(g, 2, 2), 2);
  CHECK(s.shuffled);
  REQUIRE(s.lists.size() == 1);
  const ShardList& l = s.lists[0];
  CHECK(l.lanes() == 2);
  CHECK(l.records.size() == 6);
  CHECK(l.pad_count == 2);
  CHECK(s.stored_edges() == 6);
  CHECK(s.real_edges() == 4);
  CHECK(l.is_null(3));
  CHECK(l.is_null(5));
  CHECK_FALSE(l.is_null(4));
  CHECK(l.dst_interval_at(1) == 1);
}

TEST_CASE("stride mapping is a permutation into residue classes") {
  Graph g = path_graph(10);
  for (std::uint32_t k : {2u, 3u, 4u}) {
    StrideMapping m = stride_map(g, k);
    std::set<VertexId> ids(m.new_id.begin(), m.new_id.end());
    CHECK(ids.size() == g.n);
    for (VertexId v = 0; v < g.n; ++v) CHECK(m.old_id[m.new_id[v]] == v);
    CHECK(m.graph.m() == g.m());
  }
  StrideMapping m = stride_map(path_graph(8), 2);
  CHECK(m.new_id == std::vector<VertexId>{0, 4, 1, 5, 2, 6, 3, 7});
  std::vector<int> mapped{10, 12, 14, 16, 11, 13, 15, 17};
  CHECK(unmap_values(mapped, m.new_id) == std::vector<int>{10, 11, 12, 13, 14, 15, 16, 17});
}

TEST_CASE("layout configuration rejects bad sizes") {
  Graph g = path_graph(4);
  CHECK_THROWS_AS(interval_shard(g, kMaxShardInterval + 1, 1), Error);
  CHECK_THROWS_AS(horizontal_edge_list(g, 0, 1), Error);
}
