#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "enttopo/graph.hpp"

namespace enttopo {

enum class PauliBasis { X, Y, Z };

inline std::string to_string(PauliBasis b) {
  switch (b) {
    case PauliBasis::X: return "X";
    case PauliBasis::Y: return "Y";
    case PauliBasis::Z: return "Z";
  }
  return "?";
}

/// Complements the edge set among the neighbors of a; everything else is
/// untouched.
inline void complement_neighborhood(LabeledGraph& g, VertexId a) {
  g.require_live(a);
  const std::vector<VertexId> nbrs(g.neighbors(a).begin(), g.neighbors(a).end());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
      g.toggle_edge(nbrs[i], nbrs[j]);
    }
  }
}

struct MeasurementOutcomeGraph {
  LabeledGraph result_graph;
  PauliBasis basis;
  VertexId measured_qubit;
  /// b0 actually used; present only for X measurements with a nonempty
  /// neighborhood.
  std::optional<VertexId> special_neighbor;
};

/// Stabilizer state |G> presented by its graph. Every operation returns a new
/// value; the input is never mutated.
///
/// Measurement rewrites track the graph shape only. The post-measurement
/// state equals the rewritten graph state up to local unitaries, and those
/// byproducts are deliberately left opaque: all verification goes through
/// LU-invariants (Schmidt ranks).
class GraphState {
public:
  explicit GraphState(LabeledGraph g) : graph_(std::move(g)) {}

  /// |L>_n: path of n qubits, CZ between consecutive |+> qubits.
  static GraphState linear_cluster(std::size_t n) {
    if (n == 0) {
      throw std::invalid_argument("linear cluster needs at least one qubit");
    }
    return GraphState(LabeledGraph::path_graph(n));
  }

  /// rows x cols 2D cluster with nearest-neighbor entanglement.
  static GraphState lattice_cluster(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("lattice cluster dimensions must be positive");
    }
    return GraphState(LabeledGraph::grid_graph(rows, cols));
  }

  const LabeledGraph& graph() const { return graph_; }
  std::size_t qubit_count() const { return graph_.vertex_count(); }

  GraphState local_complement(VertexId a) const {
    LabeledGraph g = graph_;
    complement_neighborhood(g, a);
    return GraphState(std::move(g));
  }

  /// Pauli measurement of qubit a, as a graph rewrite (+1 branch):
  ///   Z: G - a
  ///   Y: tau_a(G) - a
  ///   X: tau_b0( tau_a( tau_b0(G) ) - a ),  b0 in N(a)
  /// An isolated qubit is simply deleted under any basis. If b0 is omitted
  /// for X, the smallest-id neighbor is used.
  MeasurementOutcomeGraph measure_pauli(VertexId a, PauliBasis basis,
                                        std::optional<VertexId> b0 = {}) const {
    graph_.require_live(a);
    if (b0 && basis != PauliBasis::X) {
      throw std::invalid_argument("b0 is only meaningful for X measurements");
    }
    LabeledGraph g = graph_;
    std::optional<VertexId> used_b0;
    switch (basis) {
      case PauliBasis::Z:
        g.remove_vertex(a);
        break;
      case PauliBasis::Y:
        complement_neighborhood(g, a);
        g.remove_vertex(a);
        break;
      case PauliBasis::X: {
        if (g.neighbors(a).empty()) {
          if (b0) {
            throw std::invalid_argument("b0 given but measured qubit is isolated");
          }
          g.remove_vertex(a);
          break;
        }
        const VertexId b = b0 ? *b0 : g.neighbors(a).front();
        if (!g.has_edge(a, b)) {
          throw std::invalid_argument("b0 " + std::to_string(b) +
                                      " is not a neighbor of the measured qubit");
        }
        complement_neighborhood(g, b);
        complement_neighborhood(g, a);
        g.remove_vertex(a);
        complement_neighborhood(g, b);
        used_b0 = b;
        break;
      }
    }
    return MeasurementOutcomeGraph{std::move(g), basis, a, used_b0};
  }

  /// Z-measures every neighbor of the path that is not on it, then X-measures
  /// the interior path qubits front to back. Each X uses the contracted
  /// predecessor (the front endpoint) as b0, which keeps the endpoints at the
  /// ends of the shrinking chain. The endpoints are left sharing an edge,
  /// disconnected from everything else.
  GraphState extract_bell_along_path(std::span<const VertexId> path) const {
    validate_path(path);
    GraphState cur = *this;

    std::set<VertexId> on_path(path.begin(), path.end());
    std::set<VertexId> outside;
    for (VertexId p : path) {
      for (VertexId w : graph_.neighbors(p)) {
        if (!on_path.count(w)) {
          outside.insert(w);
        }
      }
    }
    for (VertexId v : outside) {
      cur = GraphState(cur.measure_pauli(v, PauliBasis::Z).result_graph);
    }

    const VertexId front = path.front();
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      cur = GraphState(
          cur.measure_pauli(path[i], PauliBasis::X, front).result_graph);
    }
    return cur;
  }

private:
  void validate_path(std::span<const VertexId> path) const {
    if (path.size() < 2) {
      throw std::invalid_argument("path must contain at least two qubits");
    }
    std::set<VertexId> seen;
    for (VertexId v : path) {
      graph_.require_live(v);
      if (!seen.insert(v).second) {
        throw std::invalid_argument("path visits qubit " + std::to_string(v) +
                                    " twice");
      }
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (!graph_.has_edge(path[i], path[i + 1])) {
        throw std::invalid_argument("list is not a path: missing edge " +
                                    std::to_string(path[i]) + "-" +
                                    std::to_string(path[i + 1]));
      }
    }
  }

  LabeledGraph graph_;
};

} // namespace enttopo
