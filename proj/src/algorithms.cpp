#include "gsim/algorithms.hpp"

#include <algorithm>
#include <limits>

namespace gsim {

std::string_view to_string(Problem p) {
  switch (p) {
    case Problem::BFS: return "BFS";
    case Problem::PR: return "PR";
    case Problem::WCC: return "WCC";
    case Problem::SSSP: return "SSSP";
    case Problem::SpMV: return "SpMV";
  }
  return "?";
}

Problem parse_problem(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "bfs") return Problem::BFS;
  if (lower == "pr" || lower == "pagerank") return Problem::PR;
  if (lower == "wcc") return Problem::WCC;
  if (lower == "sssp") return Problem::SSSP;
  if (lower == "spmv") return Problem::SpMV;
  throw UsageError("unknown problem: " + std::string(s));
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::ImmediateAsc: return "immediate_asc";
    case Scheme::TwoPhase: return "two_phase";
    case Scheme::LevelSync: return "level_sync";
  }
  return "?";
}

ProblemSpec make_problem(Problem p, double damping) {
  ProblemSpec spec;
  spec.problem = p;
  spec.damping = damping;
  spec.weighted = p == Problem::SSSP || p == Problem::SpMV;
  if (p == Problem::PR || p == Problem::SpMV) {
    spec.reduction = Reduction::Sum;
    spec.fixed_iterations = 1;
  }
  return spec;
}

bool needs_root(Problem p) { return p == Problem::BFS || p == Problem::SSSP; }

VertexValues init_values(const ProblemSpec& spec, const Graph& g, VertexId root) {
  if (needs_root(spec.problem) && root >= g.n) {
    throw Error("root vertex " + std::to_string(root) + " out of range (n=" + std::to_string(g.n) + ")");
  }
  VertexValues values(g.n);
  switch (spec.problem) {
    case Problem::BFS:
    case Problem::SSSP:
      std::fill(values.begin(), values.end(), kUnreached);
      values[root] = 0;
      break;
    case Problem::WCC:
      for (std::uint32_t v = 0; v < g.n; ++v) values[v] = v;
      break;
    case Problem::PR:
      std::fill(values.begin(), values.end(), 1.0 / g.n);
      break;
    case Problem::SpMV:
      std::fill(values.begin(), values.end(), 1.0);
      break;
  }
  return values;
}

Value identity(const ProblemSpec& spec) { return spec.reduction == Reduction::Min ? kUnreached : 0.0; }

Value reduce(const ProblemSpec& spec, Value a, Value b) {
  return spec.reduction == Reduction::Min ? std::min(a, b) : a + b;
}

Value edge_update(const ProblemSpec& spec, Value src_value, std::uint32_t weight, std::uint32_t src_out_degree) {
  switch (spec.problem) {
    case Problem::BFS: return std::min(src_value + 1.0, kUnreached);
    case Problem::WCC: return src_value;
    case Problem::SSSP: return std::min(src_value + weight, kUnreached);
    case Problem::PR: return src_out_degree == 0 ? 0.0 : src_value / src_out_degree;
    case Problem::SpMV: return src_value * weight;
  }
  return src_value;
}

Applied apply(const ProblemSpec& spec, Value accumulated, Value old_value, std::uint32_t n) {
  switch (spec.problem) {
    case Problem::PR: {
      Value v = spec.pr_normalize ? (1.0 - spec.damping) / n + spec.damping * accumulated : accumulated;
      return {v, true};
    }
    case Problem::SpMV: return {accumulated, true};
    default: {
      Value v = std::min(old_value, accumulated);
      return {v, v < old_value};
    }
  }
}

bool initially_active(const ProblemSpec& spec, Value v) {
  return spec.reduction == Reduction::Sum || v != kUnreached;
}

namespace {

struct InCsr {
  std::vector<std::uint64_t> offsets;
  std::vector<Edge> edges;  // grouped by destination, input order within a group
};

InCsr build_in_csr(const Graph& g) {
  InCsr csr;
  csr.offsets.assign(g.n + 1, 0);
  for (const Edge& e : g.edges) ++csr.offsets[e.dst + 1];
  for (std::uint32_t v = 0; v < g.n; ++v) csr.offsets[v + 1] += csr.offsets[v];
  csr.edges.resize(g.edges.size());
  std::vector<std::uint64_t> fill(csr.offsets.begin(), csr.offsets.end() - 1);
  for (const Edge& e : g.edges) csr.edges[fill[e.dst]++] = e;
  return csr;
}

}  // namespace

ReferenceResult reference_run(const ProblemSpec& spec, const Graph& g, VertexId root, Scheme scheme) {
  ReferenceResult out;
  out.values = init_values(spec, g, root);
  auto& values = out.values;
  const auto deg = out_degrees(g);
  const unsigned max_passes = spec.fixed_iterations.value_or(std::numeric_limits<unsigned>::max());

  // Fixed-iteration problems always read the previous iteration's values.
  if (spec.fixed_iterations) {
    for (unsigned it = 0; it < max_passes; ++it) {
      VertexValues acc(g.n, identity(spec));
      for (const Edge& e : g.edges) {
        acc[e.dst] = reduce(spec, acc[e.dst], edge_update(spec, values[e.src], e.weight, deg[e.src]));
      }
      for (std::uint32_t v = 0; v < g.n; ++v) values[v] = apply(spec, acc[v], values[v], g.n).value;
      ++out.iterations;
    }
    return out;
  }

  switch (scheme) {
    case Scheme::ImmediateAsc: {
      const InCsr csr = build_in_csr(g);
      bool changed = true;
      while (changed) {
        changed = false;
        ++out.iterations;
        for (std::uint32_t v = 0; v < g.n; ++v) {
          Value acc = identity(spec);
          for (std::uint64_t i = csr.offsets[v]; i < csr.offsets[v + 1]; ++i) {
            const Edge& e = csr.edges[i];
            acc = reduce(spec, acc, edge_update(spec, values[e.src], e.weight, deg[e.src]));
          }
          auto r = apply(spec, acc, values[v], g.n);
          values[v] = r.value;
          changed |= r.changed;
        }
      }
      break;
    }
    case Scheme::TwoPhase: {
      bool changed = true;
      while (changed) {
        changed = false;
        ++out.iterations;
        VertexValues acc(g.n, identity(spec));
        for (const Edge& e : g.edges) {
          acc[e.dst] = reduce(spec, acc[e.dst], edge_update(spec, values[e.src], e.weight, deg[e.src]));
        }
        for (std::uint32_t v = 0; v < g.n; ++v) {
          auto r = apply(spec, acc[v], values[v], g.n);
          values[v] = r.value;
          changed |= r.changed;
        }
      }
      break;
    }
    case Scheme::LevelSync: {
      std::vector<std::uint64_t> offsets(g.n + 1, 0);
      for (const Edge& e : g.edges) ++offsets[e.src + 1];
      for (std::uint32_t v = 0; v < g.n; ++v) offsets[v + 1] += offsets[v];
      std::vector<Edge> out_edges(g.edges.size());
      {
        std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
        for (const Edge& e : g.edges) out_edges[fill[e.src]++] = e;
      }
      std::vector<VertexId> frontier;
      for (std::uint32_t v = 0; v < g.n; ++v) {
        if (initially_active(spec, values[v])) frontier.push_back(v);
      }
      VertexValues acc(g.n, identity(spec));
      std::vector<char> touched(g.n, 0);
      std::vector<VertexId> touched_list;
      while (true) {
        ++out.iterations;
        touched_list.clear();
        for (VertexId u : frontier) {
          for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
            const Edge& e = out_edges[i];
            acc[e.dst] = reduce(spec, acc[e.dst], edge_update(spec, values[u], e.weight, deg[u]));
            if (!touched[e.dst]) {
              touched[e.dst] = 1;
              touched_list.push_back(e.dst);
            }
          }
        }
        std::sort(touched_list.begin(), touched_list.end());
        frontier.clear();
        for (VertexId v : touched_list) {
          auto r = apply(spec, acc[v], values[v], g.n);
          values[v] = r.value;
          if (r.changed) frontier.push_back(v);
          acc[v] = identity(spec);
          touched[v] = 0;
        }
        if (frontier.empty()) break;
      }
      break;
    }
  }
  return out;
}

}  // namespace gsim
