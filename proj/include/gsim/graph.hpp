#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gsim {

/// Base class for all simulator errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid flag combination or malformed user input; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

using VertexId = std::uint32_t;

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  std::uint32_t weight = 0;  // meaningful only when the graph is weighted

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable input graph. Undirected graphs store every edge in both
/// directions; original_edge_count keeps the size of the source data.
struct Graph {
  std::uint32_t n = 0;
  std::vector<Edge> edges;
  bool directed = true;
  bool weighted = false;
  std::uint64_t original_edge_count = 0;
  std::string name;
  // Source-file id of every vertex; empty when ids were not relabeled.
  std::vector<std::uint64_t> labels;

  std::uint64_t m() const { return edges.size(); }
};

/// Dense id of the vertex whose source-file id is `label`.
std::optional<VertexId> vertex_by_label(const Graph& g, std::uint64_t label);

/// Root for `g`: the named graph's usual root (by source id) when present,
/// otherwise the vertex of highest out-degree (lowest id on ties).
VertexId choose_root(const Graph& g);

struct GraphStats {
  double avg_degree = 0.0;
  double skewness = 0.0;
  bool uniform_degrees = false;  // sigma == 0, skewness undefined and reported as 0
  std::map<std::uint64_t, std::uint64_t> degree_histogram;
  std::optional<std::uint32_t> diameter_estimate;
};

struct LoadOptions {
  bool weighted = false;
  bool directed = true;
  std::string name;
};

/// Reads a SNAP-style whitespace separated edge list. Vertex ids are densely
/// relabeled in order of first appearance.
Graph load_edge_list(const std::filesystem::path& path, const LoadOptions& opts = {});

/// Recursive-matrix generator with the Graph500 quadrant probabilities and a
/// seeded vertex label permutation. Always yields exactly 2^scale * avg_degree
/// directed edges.
Graph generate_rmat(unsigned scale, unsigned avg_degree, std::uint64_t seed);

GraphStats stats(const Graph& g, bool estimate_diameter = false);

std::vector<std::uint32_t> out_degrees(const Graph& g);
std::vector<std::uint32_t> in_degrees(const Graph& g);

/// Attaches deterministic integer weights in [1, max_weight] to an unweighted
/// graph. Undirected graphs get the same weight on both directions.
Graph with_weights(Graph g, std::uint64_t seed, std::uint32_t max_weight = 64);

// Binary cache: "GSIMGRPH" magic, u32 version, u32 flags (bit 0 directed,
// bit 1 weighted, bit 2 labels), u64 n, u64 m, u64 original_edge_count,
// u32 name length, name bytes, n u64 labels when flagged, then m
// little-endian records of (u32 src, u32 dst[, u32 weight]).
void save_binary(const Graph& g, const std::filesystem::path& path);
Graph load_binary(const std::filesystem::path& path);

/// Root vertex commonly used for the named benchmark graph (two-letter short
/// names such as "sd" or "r24"), if known.
std::optional<VertexId> default_root(std::string_view graph_name);

/// Resolves a graph argument: "rmat:scale:degree:seed", a ".gsg" binary cache,
/// or a text edge list. Text lists named like SNAP undirected dumps
/// ("*.ungraph.txt") are loaded undirected unless overridden.
struct GraphSource {
  std::string spec;
  std::optional<bool> directed = std::nullopt;
  bool weighted = false;
};
Graph resolve_graph(const GraphSource& source);

}  // namespace gsim
