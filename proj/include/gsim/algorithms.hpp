#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsim/graph.hpp"

namespace gsim {

enum class Problem { BFS, PR, WCC, SSSP, SpMV };
enum class Reduction { Min, Sum };
enum class Scheme { ImmediateAsc, TwoPhase, LevelSync };

std::string_view to_string(Problem p);
Problem parse_problem(std::string_view s);
std::string_view to_string(Scheme s);

/// Vertex values are 32 bits wide in memory. Integer problems keep exact
/// integral values in a double; the unreached sentinel is 2^32 - 1.
using Value = double;
using VertexValues = std::vector<Value>;

inline constexpr Value kUnreached = 4294967295.0;

struct ProblemSpec {
  Problem problem = Problem::BFS;
  unsigned value_width = 4;
  bool weighted = false;
  std::optional<unsigned> fixed_iterations;
  Reduction reduction = Reduction::Min;
  double damping = 0.85;
  // PR only: when false the new value is the plain accumulated sum.
  bool pr_normalize = true;
};

ProblemSpec make_problem(Problem p, double damping = 0.85);

/// Whether the problem needs a root vertex (BFS, SSSP).
bool needs_root(Problem p);

VertexValues init_values(const ProblemSpec& spec, const Graph& g, VertexId root);

/// Neutral element of the reduction.
Value identity(const ProblemSpec& spec);
Value reduce(const ProblemSpec& spec, Value a, Value b);

Value edge_update(const ProblemSpec& spec, Value src_value, std::uint32_t weight,
                  std::uint32_t src_out_degree);

struct Applied {
  Value value;
  bool changed;
};
Applied apply(const ProblemSpec& spec, Value accumulated, Value old_value, std::uint32_t n);

/// True when a vertex holding `v` can emit an effective update. Used to seed
/// partition skipping and update filtering in the first iteration.
bool initially_active(const ProblemSpec& spec, Value v);

struct ReferenceResult {
  VertexValues values;
  unsigned iterations = 0;
};

/// Memory-free value-level oracle for the three propagation schemes.
/// Convergence problems count the final pass that observes no change.
ReferenceResult reference_run(const ProblemSpec& spec, const Graph& g, VertexId root, Scheme scheme);

}  // namespace gsim
