#include "gsim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

namespace gsim {

namespace {

constexpr char kMagic[8] = {'G', 'S', 'I', 'M', 'G', 'R', 'P', 'H'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagDirected = 1u << 0;
constexpr std::uint32_t kFlagWeighted = 1u << 1;
constexpr std::uint32_t kFlagLabels = 1u << 2;

const char* skip_space(const char* p, const char* end) {
  while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  return p;
}

template <typename T>
bool parse_field(const char*& p, const char* end, T& out) {
  p = skip_space(p, end);
  if (p == end) return false;
  auto [next, ec] = std::from_chars(p, end, out);
  if (ec != std::errc{} || (next != end && *next != ' ' && *next != '\t' && *next != '\r')) {
    return false;
  }
  p = next;
  return true;
}

template <typename T>
void put_le(std::ostream& os, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw Error("truncated binary graph");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

Graph load_edge_list(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read edge list: " + path.string());

  Graph g;
  g.directed = opts.directed;
  g.weighted = opts.weighted;
  g.name = opts.name.empty() ? path.stem().string() : opts.name;

  std::unordered_map<std::uint64_t, VertexId> relabel;
  auto dense = [&](std::uint64_t raw) {
    auto [it, inserted] = relabel.try_emplace(raw, static_cast<VertexId>(relabel.size()));
    if (inserted && relabel.size() > std::numeric_limits<VertexId>::max()) {
      throw Error("too many vertices for 32-bit ids");
    }
    return it->second;
  };

  std::vector<Edge> input;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const char* p = line.data();
    const char* end = p + line.size();
    p = skip_space(p, end);
    if (p == end || *p == '#' || *p == '%') continue;

    std::uint64_t src = 0, dst = 0;
    if (!parse_field(p, end, src) || !parse_field(p, end, dst)) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed edge line");
    }
    Edge e;
    if (opts.weighted) {
      std::uint32_t w = 0;
      if (!parse_field(p, end, w)) {
        throw Error(path.string() + ":" + std::to_string(lineno) + ": missing or invalid weight");
      }
      e.weight = w;
    }
    e.src = dense(src);
    e.dst = dense(dst);
    input.push_back(e);
  }
  if (input.empty()) throw Error("no edges in " + path.string());

  g.n = static_cast<std::uint32_t>(relabel.size());
  g.labels.resize(g.n);
  for (const auto& [raw, id] : relabel) g.labels[id] = raw;
  g.original_edge_count = input.size();
  if (g.directed) {
    g.edges = std::move(input);
  } else {
    g.edges.reserve(input.size() * 2);
    for (const Edge& e : input) {
      g.edges.push_back(e);
      g.edges.push_back(Edge{e.dst, e.src, e.weight});
    }
  }
  return g;
}

std::vector<std::uint32_t> out_degrees(const Graph& g) {
  std::vector<std::uint32_t> deg(g.n, 0);
  for (const Edge& e : g.edges) ++deg[e.src];
  return deg;
}

std::vector<std::uint32_t> in_degrees(const Graph& g) {
  std::vector<std::uint32_t> deg(g.n, 0);
  for (const Edge& e : g.edges) ++deg[e.dst];
  return deg;
}

namespace {

// Eccentricity lower bound by repeated BFS sweeps over the out-edges.
std::uint32_t double_sweep(const Graph& g) {
  std::vector<std::uint64_t> offsets(g.n + 1, 0);
  for (const Edge& e : g.edges) ++offsets[e.src + 1];
  for (std::uint32_t v = 0; v < g.n; ++v) offsets[v + 1] += offsets[v];
  std::vector<VertexId> adj(g.edges.size());
  std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : g.edges) adj[fill[e.src]++] = e.dst;

  auto bfs = [&](VertexId root, VertexId& farthest) {
    std::vector<std::uint32_t> dist(g.n, std::numeric_limits<std::uint32_t>::max());
    std::queue<VertexId> q;
    dist[root] = 0;
    q.push(root);
    farthest = root;
    while (!q.empty()) {
      VertexId u = q.front();
      q.pop();
      if (dist[u] > dist[farthest]) farthest = u;
      for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
        if (dist[adj[i]] == std::numeric_limits<std::uint32_t>::max()) {
          dist[adj[i]] = dist[u] + 1;
          q.push(adj[i]);
        }
      }
    }
    return dist[farthest];
  };

  VertexId start = 0;
  std::uint32_t best_deg = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (offsets[v + 1] - offsets[v] > best_deg) {
      best_deg = static_cast<std::uint32_t>(offsets[v + 1] - offsets[v]);
      start = v;
    }
  }
  std::uint32_t best = 0;
  VertexId next = start;
  for (int sweep = 0; sweep < 4; ++sweep) {
    VertexId far = next;
    best = std::max(best, bfs(next, far));
    if (far == next) break;
    next = far;
  }
  return best;
}

}  // namespace

GraphStats stats(const Graph& g, bool estimate_diameter) {
  if (g.n == 0) throw Error("stats of an empty vertex set");
  GraphStats s;
  s.avg_degree = static_cast<double>(g.m()) / g.n;

  auto deg = out_degrees(g);
  for (auto d : deg) ++s.degree_histogram[d];

  double mean = s.avg_degree;
  double m2 = 0.0, m3 = 0.0;
  for (auto d : deg) {
    double x = d - mean;
    m2 += x * x;
    m3 += x * x * x;
  }
  m2 /= g.n;
  m3 /= g.n;
  if (m2 <= 0.0) {
    s.uniform_degrees = true;
    s.skewness = 0.0;
  } else {
    s.skewness = m3 / std::pow(m2, 1.5);
  }
  if (estimate_diameter && g.m() > 0) s.diameter_estimate = double_sweep(g);
  return s;
}

Graph with_weights(Graph g, std::uint64_t seed, std::uint32_t max_weight) {
  if (g.weighted) return g;
  if (max_weight == 0) throw Error("max_weight must be positive");
  // Weight is a hash of the unordered endpoint pair so that both directions of
  // an undirected edge agree.
  auto mix = [seed](std::uint64_t x) {
    x ^= seed + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  for (Edge& e : g.edges) {
    std::uint64_t lo = std::min(e.src, e.dst), hi = std::max(e.src, e.dst);
    std::uint64_t key = g.directed ? (std::uint64_t{e.src} << 32 | e.dst) : (lo << 32 | hi);
    e.weight = static_cast<std::uint32_t>(mix(key) % max_weight) + 1;
  }
  g.weighted = true;
  return g;
}

void save_binary(const Graph& g, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kVersion);
  put_le<std::uint32_t>(os, (g.directed ? kFlagDirected : 0) | (g.weighted ? kFlagWeighted : 0) |
                                 (g.labels.empty() ? 0 : kFlagLabels));
  put_le<std::uint64_t>(os, g.n);
  put_le<std::uint64_t>(os, g.m());
  put_le<std::uint64_t>(os, g.original_edge_count);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.name.size()));
  os.write(g.name.data(), static_cast<std::streamsize>(g.name.size()));
  if (!g.labels.empty()) {
    for (auto l : g.labels) put_le<std::uint64_t>(os, l);
  }
  for (const Edge& e : g.edges) {
    put_le(os, e.src);
    put_le(os, e.dst);
    if (g.weighted) put_le(os, e.weight);
  }
  if (!os) throw Error("write failed: " + path.string());
}

Graph load_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("not a binary graph file: " + path.string());
  }
  if (get_le<std::uint32_t>(is) != kVersion) throw Error("unsupported binary graph version");
  auto flags = get_le<std::uint32_t>(is);
  Graph g;
  g.directed = flags & kFlagDirected;
  g.weighted = flags & kFlagWeighted;
  auto n = get_le<std::uint64_t>(is);
  auto m = get_le<std::uint64_t>(is);
  if (n > std::numeric_limits<std::uint32_t>::max()) throw Error("vertex count exceeds 32 bits");
  g.n = static_cast<std::uint32_t>(n);
  g.original_edge_count = get_le<std::uint64_t>(is);
  g.name.resize(get_le<std::uint32_t>(is));
  if (!is.read(g.name.data(), static_cast<std::streamsize>(g.name.size()))) {
    throw Error("truncated binary graph");
  }
  if (flags & kFlagLabels) {
    g.labels.resize(g.n);
    for (auto& l : g.labels) l = get_le<std::uint64_t>(is);
  }
  g.edges.resize(m);
  for (Edge& e : g.edges) {
    e.src = get_le<std::uint32_t>(is);
    e.dst = get_le<std::uint32_t>(is);
    if (g.weighted) e.weight = get_le<std::uint32_t>(is);
    if (e.src >= g.n || e.dst >= g.n) throw Error("edge endpoint out of range");
  }
  return g;
}

std::optional<VertexId> vertex_by_label(const Graph& g, std::uint64_t label) {
  if (g.labels.empty()) {
    if (label < g.n) return static_cast<VertexId>(label);
    return std::nullopt;
  }
  auto it = std::find(g.labels.begin(), g.labels.end(), label);
  if (it == g.labels.end()) return std::nullopt;
  return static_cast<VertexId>(it - g.labels.begin());
}

VertexId choose_root(const Graph& g) {
  if (auto r = default_root(g.name)) {
    if (auto v = vertex_by_label(g, *r)) return *v;
  }
  auto deg = out_degrees(g);
  VertexId best = 0;
  for (VertexId v = 1; v < g.n; ++v) {
    if (deg[v] > deg[best]) best = v;
  }
  return best;
}

std::optional<VertexId> default_root(std::string_view name) {
  static const std::map<std::string, VertexId, std::less<>> roots = {
      {"tw", 2748769}, {"lj", 772860},  {"or", 1386825}, {"wt", 17540},
      {"pk", 315318},  {"yt", 140289},  {"db", 9799},    {"sd", 30279},
      {"rd", 1166467}, {"bk", 546279},  {"r24", 535262}, {"r21", 74764},
  };
  if (auto it = roots.find(name); it != roots.end()) return it->second;
  return std::nullopt;
}

Graph resolve_graph(const GraphSource& source) {
  const std::string& spec = source.spec;
  Graph g;
  if (spec.rfind("rmat:", 0) == 0) {
    unsigned scale = 0, degree = 0;
    std::uint64_t seed = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec.substr(5));
    if (!(ss >> scale >> c1 >> degree >> c2 >> seed) || c1 != ':' || c2 != ':') {
      throw UsageError("graph spec must look like rmat:scale:degree:seed, got " + spec);
    }
    g = generate_rmat(scale, degree, seed);
    if (source.directed.has_value() && !*source.directed) {
      throw UsageError("generated graphs are directed");
    }
  } else {
    std::filesystem::path p(spec);
    if (p.extension() == ".gsg") {
      g = load_binary(p);
    } else {
      LoadOptions opts;
      opts.weighted = source.weighted;
      opts.directed = source.directed.value_or(spec.find("ungraph") == std::string::npos);
      g = load_edge_list(p, opts);
    }
  }
  return g;
}

}  // namespace gsim
