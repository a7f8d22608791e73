#include <random>
#include <string>

#include "gsim/graph.hpp"

namespace gsim {

namespace {

// Graph500 quadrant probabilities; d = 1 - a - b - c.
constexpr double kA = 0.57;
constexpr double kB = 0.19;
constexpr double kC = 0.19;

// Uniform in [0, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Graph generate_rmat(unsigned scale, unsigned avg_degree, std::uint64_t seed) {
  if (scale < 1) throw Error("rmat scale must be at least 1");
  if (avg_degree < 1) throw Error("rmat average degree must be at least 1");
  if (scale > 31) throw Error("rmat scale " + std::to_string(scale) + " exceeds 32-bit vertex ids");

  Graph g;
  g.n = std::uint32_t{1} << scale;
  g.directed = true;
  g.name = "rmat-" + std::to_string(scale) + "-" + std::to_string(avg_degree);
  const std::uint64_t m = std::uint64_t{g.n} * avg_degree;
  g.original_edge_count = m;
  g.edges.resize(m);

  std::mt19937_64 rng(seed);

  // Label permutation, so that high-degree vertices are spread over the id range.
  std::vector<VertexId> perm(g.n);
  for (std::uint32_t v = 0; v < g.n; ++v) perm[v] = v;
  for (std::uint32_t i = g.n - 1; i > 0; --i) {
    auto j = static_cast<std::uint32_t>(rng() % (std::uint64_t{i} + 1));
    std::swap(perm[i], perm[j]);
  }

  for (Edge& e : g.edges) {
    std::uint32_t src = 0, dst = 0;
    for (unsigned level = 0; level < scale; ++level) {
      double r = unit(rng);
      std::uint32_t bit = std::uint32_t{1} << (scale - 1 - level);
      if (r < kA) {
      } else if (r < kA + kB) {
        dst |= bit;
      } else if (r < kA + kB + kC) {
        src |= bit;
      } else {
        src |= bit;
        dst |= bit;
      }
    }
    e.src = perm[src];
    e.dst = perm[dst];
  }
  return g;
}

}  // namespace gsim
