#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "enttopo/errors.hpp"
#include "enttopo/graph.hpp"

namespace enttopo {

using NodeId = std::uint32_t;

/// Total assignment of connectivity vertices to network nodes. Node ids run
/// over {0..node_count-1}; some nodes may own zero vertices (possible under
/// random allocation). Color classes are always taken over live vertices, so
/// the same coloring stays valid while the graph loses vertices to failures.
class Coloring {
public:
  Coloring(std::vector<NodeId> assignment, NodeId node_count)
      : assignment_(std::move(assignment)), node_count_(node_count) {
    if (node_count_ == 0) {
      throw std::invalid_argument("coloring needs at least one node");
    }
    for (NodeId c : assignment_) {
      if (c >= node_count_) {
        throw std::invalid_argument("vertex colored with out-of-range node " +
                                    std::to_string(c));
      }
    }
  }

  NodeId node_count() const { return node_count_; }
  std::size_t vertex_count() const { return assignment_.size(); }

  NodeId node_of(VertexId v) const {
    if (v >= assignment_.size()) {
      throw InvalidVertexError("vertex " + std::to_string(v) +
                               " outside the coloring domain");
    }
    return assignment_[v];
  }

  const std::vector<NodeId>& assignment() const { return assignment_; }

  /// Live members of S_c, ascending.
  std::vector<VertexId> color_class(const LabeledGraph& g, NodeId c) const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < assignment_.size(); ++v) {
      if (assignment_[v] == c && g.is_live(v)) {
        out.push_back(v);
      }
    }
    return out;
  }

  std::vector<std::vector<VertexId>> color_classes(const LabeledGraph& g) const {
    std::vector<std::vector<VertexId>> classes(node_count_);
    for (VertexId v = 0; v < assignment_.size(); ++v) {
      if (g.is_live(v)) {
        classes[assignment_[v]].push_back(v);
      }
    }
    return classes;
  }

private:
  std::vector<NodeId> assignment_;
  NodeId node_count_;
};

struct MemoryReport {
  std::vector<long long> per_node;
  long long max_per_node = 0;
  long long total = 0;
};

/// Entanglement topology T = (connectivity graph, coloring) plus the resource
/// parameters: parallelism factor mu and the decoration flag. Decorations do
/// not change the connectivity graph; they change memory accounting (mu ->
/// 3*mu per logical vertex) and failure semantics.
class EntanglementTopology {
public:
  EntanglementTopology(LabeledGraph connectivity, Coloring coloring, int mu,
                       bool decorated,
                       std::optional<std::pair<int, int>> lattice_dims = {})
      : connectivity_(std::move(connectivity)), coloring_(std::move(coloring)),
        mu_(mu), decorated_(decorated), lattice_dims_(lattice_dims) {
    if (mu_ < 1) {
      throw std::invalid_argument("parallelism factor must be positive");
    }
    if (coloring_.vertex_count() != connectivity_.id_bound()) {
      throw std::invalid_argument(
          "coloring must cover every connectivity vertex: got " +
          std::to_string(coloring_.vertex_count()) + " colors for " +
          std::to_string(connectivity_.id_bound()) + " vertices");
    }
  }

  const LabeledGraph& connectivity() const { return connectivity_; }
  const Coloring& coloring() const { return coloring_; }
  int mu() const { return mu_; }
  bool decorated() const { return decorated_; }
  std::optional<std::pair<int, int>> lattice_dims() const {
    return lattice_dims_;
  }
  NodeId node_count() const { return coloring_.node_count(); }

  /// Physical qubits per logical vertex: mu, or 3*mu once decorated.
  int qubits_per_logical_vertex() const { return decorated_ ? 3 * mu_ : mu_; }

  EntanglementTopology with_connectivity(LabeledGraph g) const {
    return EntanglementTopology(std::move(g), coloring_, mu_, decorated_,
                                lattice_dims_);
  }

  std::vector<NodeId> nonempty_nodes() const {
    std::vector<NodeId> out;
    const auto classes = coloring_.color_classes(connectivity_);
    for (NodeId c = 0; c < coloring_.node_count(); ++c) {
      if (!classes[c].empty()) {
        out.push_back(c);
      }
    }
    return out;
  }

private:
  LabeledGraph connectivity_;
  Coloring coloring_;
  int mu_;
  bool decorated_;
  std::optional<std::pair<int, int>> lattice_dims_;
};

/// Snake topology S_N: a 1 x n path of logical vertices backed by mu parallel
/// linear cluster states under one shared allocation.
inline EntanglementTopology build_snake(std::size_t n_logical, int mu,
                                        bool decorated, Coloring coloring) {
  if (n_logical == 0) {
    throw std::invalid_argument("snake topology needs at least one vertex");
  }
  if (coloring.vertex_count() != n_logical) {
    throw std::invalid_argument("coloring covers " +
                                std::to_string(coloring.vertex_count()) +
                                " vertices, snake has " +
                                std::to_string(n_logical));
  }
  return EntanglementTopology(LabeledGraph::path_graph(n_logical),
                              std::move(coloring), mu, decorated,
                              std::pair<int, int>{1, static_cast<int>(n_logical)});
}

/// 2D topology T_{M,N}; M = 1 degenerates to the snake.
inline EntanglementTopology build_lattice(std::size_t m_logical,
                                          std::size_t n_logical, int mu,
                                          bool decorated, Coloring coloring) {
  if (m_logical == 0 || n_logical == 0) {
    throw std::invalid_argument("lattice dimensions must be positive");
  }
  if (coloring.vertex_count() != m_logical * n_logical) {
    throw std::invalid_argument("coloring covers " +
                                std::to_string(coloring.vertex_count()) +
                                " vertices, lattice has " +
                                std::to_string(m_logical * n_logical));
  }
  return EntanglementTopology(
      LabeledGraph::grid_graph(m_logical, n_logical), std::move(coloring), mu,
      decorated,
      std::pair<int, int>{static_cast<int>(m_logical),
                          static_cast<int>(n_logical)});
}

/// d(c,c'): minimum hop distance between any vertex of S_c and any vertex of
/// S_{c'}; nullopt when no pair is connected.
inline std::optional<int> inter_node_distance(const EntanglementTopology& t,
                                              NodeId c, NodeId c2) {
  if (c == c2) {
    throw std::invalid_argument("inter-node distance needs distinct nodes");
  }
  const auto src = t.coloring().color_class(t.connectivity(), c);
  const auto dst = t.coloring().color_class(t.connectivity(), c2);
  if (src.empty() || dst.empty()) {
    throw EmptyClassError("node " + std::to_string(src.empty() ? c : c2) +
                          " owns no live vertices");
  }
  const std::vector<int> dist = bfs_distances(t.connectivity(), src);
  std::optional<int> best;
  for (VertexId v : dst) {
    if (dist[v] >= 0 && (!best || dist[v] < *best)) {
      best = dist[v];
    }
  }
  return best;
}

struct WorstDistanceResult {
  /// max over reachable other nodes; nullopt when every other class is
  /// unreachable.
  std::optional<int> distance;
  /// Unreachable peer classes excluded from the max.
  int excluded_pairs = 0;
};

/// D_c: worst inter-node distance from c to any other nonempty class.
inline WorstDistanceResult worst_inter_node_distance(
    const EntanglementTopology& t, NodeId c) {
  const auto classes = t.coloring().color_classes(t.connectivity());
  if (c >= classes.size() || classes[c].empty()) {
    throw EmptyClassError("node " + std::to_string(c) +
                          " owns no live vertices");
  }
  const std::vector<int> dist = bfs_distances(t.connectivity(), classes[c]);
  WorstDistanceResult out;
  bool has_peer = false;
  for (NodeId c2 = 0; c2 < classes.size(); ++c2) {
    if (c2 == c || classes[c2].empty()) {
      continue;
    }
    has_peer = true;
    int best = -1;
    for (VertexId v : classes[c2]) {
      if (dist[v] >= 0 && (best < 0 || dist[v] < best)) {
        best = dist[v];
      }
    }
    if (best < 0) {
      ++out.excluded_pairs;
    } else if (!out.distance || best > *out.distance) {
      out.distance = best;
    }
  }
  if (!has_peer) {
    throw DegenerateTopologyError(
        "no other node owns live vertices; worst inter-node distance undefined");
  }
  return out;
}

/// max_c D_c over nonempty classes: the quantity the allocation optimizer
/// minimizes. Classes that cannot reach any peer are skipped.
inline int minmax_objective(const EntanglementTopology& t) {
  const std::vector<NodeId> nodes = t.nonempty_nodes();
  if (nodes.size() < 2) {
    throw DegenerateTopologyError(
        "min-max objective needs at least two nonempty classes");
  }
  std::optional<int> worst;
  for (NodeId c : nodes) {
    const WorstDistanceResult r = worst_inter_node_distance(t, c);
    if (r.distance && (!worst || *r.distance > *worst)) {
      worst = *r.distance;
    }
  }
  if (!worst) {
    throw DegenerateTopologyError("no pair of classes is connected");
  }
  return *worst;
}

/// kappa(c,c'): maximum number of internally vertex-disjoint paths running
/// from distinct vertices of S_c to distinct vertices of S_{c'}. Computed on
/// the support graph: virtual s joined to all of S_c, virtual t to all of
/// S_{c'}, then Menger's kappa(s,t).
inline int kappa_inter_node(const EntanglementTopology& t, NodeId c,
                            NodeId c2) {
  if (c == c2) {
    throw std::invalid_argument("kappa needs distinct nodes");
  }
  const auto src = t.coloring().color_class(t.connectivity(), c);
  const auto dst = t.coloring().color_class(t.connectivity(), c2);
  if (src.empty() || dst.empty()) {
    throw EmptyClassError("node " + std::to_string(src.empty() ? c : c2) +
                          " owns no live vertices");
  }
  LabeledGraph support = t.connectivity();
  const VertexId s = support.add_vertex();
  const VertexId vt = support.add_vertex();
  for (VertexId v : src) {
    support.add_edge(s, v);
  }
  for (VertexId v : dst) {
    support.add_edge(vt, v);
  }
  return max_vertex_disjoint_paths(support, s, vt);
}

/// kappa-bar: average of kappa(c,c') over unordered pairs of nonempty
/// classes.
inline double kappa_bar(const EntanglementTopology& t) {
  const std::vector<NodeId> nodes = t.nonempty_nodes();
  if (nodes.size() < 2) {
    throw DegenerateTopologyError(
        "kappa-bar needs at least two nonempty classes");
  }
  long long sum = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      sum += kappa_inter_node(t, nodes[i], nodes[j]);
    }
  }
  const double n = static_cast<double>(nodes.size());
  return 2.0 * static_cast<double>(sum) / (n * (n - 1.0));
}

/// Per-node qubit counts: mu*|S_c| undecorated, 3*mu*|S_c| decorated.
inline MemoryReport memory_report(const EntanglementTopology& t) {
  MemoryReport out;
  const int factor = t.qubits_per_logical_vertex();
  const auto classes = t.coloring().color_classes(t.connectivity());
  out.per_node.resize(classes.size(), 0);
  for (NodeId c = 0; c < classes.size(); ++c) {
    out.per_node[c] = static_cast<long long>(factor) *
                      static_cast<long long>(classes[c].size());
    out.total += out.per_node[c];
    out.max_per_node = std::max(out.max_per_node, out.per_node[c]);
  }
  return out;
}

/// Bell-state baseline: one decorated Bell pair (6 qubits) per unordered node
/// pair, i.e. 3(C-1) qubits per node and 3C(C-1) in total.
inline MemoryReport all_to_all_memory(int c_count) {
  if (c_count < 2) {
    throw std::invalid_argument("all-to-all baseline needs at least two nodes");
  }
  MemoryReport out;
  const long long per = 3LL * (c_count - 1);
  out.per_node.assign(static_cast<std::size_t>(c_count), per);
  out.max_per_node = per;
  out.total = per * c_count;
  return out;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json topology_to_json(const EntanglementTopology& t) {
  nlohmann::json j;
  if (t.lattice_dims()) {
    j["dims"] = {t.lattice_dims()->first, t.lattice_dims()->second};
  } else {
    j["dims"] = nullptr;
  }
  j["mu"] = t.mu();
  j["decorated"] = t.decorated();
  nlohmann::json edges = nlohmann::json::array();
  const LabeledGraph& g = t.connectivity();
  for (VertexId u = 0; u < g.id_bound(); ++u) {
    if (!g.is_live(u)) {
      continue;
    }
    for (VertexId w : g.neighbors(u)) {
      if (u < w) {
        edges.push_back({u, w});
      }
    }
  }
  j["edges"] = std::move(edges);
  j["coloring"] = t.coloring().assignment();
  j["node_count"] = t.coloring().node_count();
  return j;
}

inline EntanglementTopology topology_from_json(const nlohmann::json& j) {
  const auto coloring_list = j.at("coloring").get<std::vector<NodeId>>();
  const auto node_count = j.at("node_count").get<NodeId>();
  LabeledGraph g(coloring_list.size());
  for (const auto& e : j.at("edges")) {
    g.add_edge(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
  }
  std::optional<std::pair<int, int>> dims;
  if (!j.at("dims").is_null()) {
    dims = std::pair<int, int>{j.at("dims").at(0).get<int>(),
                               j.at("dims").at(1).get<int>()};
  }
  return EntanglementTopology(std::move(g),
                              Coloring(coloring_list, node_count),
                              j.at("mu").get<int>(),
                              j.at("decorated").get<bool>(), dims);
}

} // namespace enttopo
