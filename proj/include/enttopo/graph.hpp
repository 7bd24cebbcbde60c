#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "enttopo/errors.hpp"

namespace enttopo {

using VertexId = std::uint32_t;

/// Undirected simple graph over dense integer vertex ids.
///
/// Vertex deletion marks the id dead instead of reindexing, so colorings and
/// failure traces keep referring to original ids. Adjacency lists are kept
/// sorted ascending, which makes neighbor iteration (and everything derived
/// from it, e.g. the default measurement partner choice) deterministic.
class LabeledGraph {
public:
  LabeledGraph() = default;

  explicit LabeledGraph(std::size_t vertex_count)
      : adj_(vertex_count), alive_(vertex_count, 1), live_count_(vertex_count) {}

  /// Path 0-1-...-(n-1).
  static LabeledGraph path_graph(std::size_t n) {
    LabeledGraph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      g.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(i + 1));
    }
    return g;
  }

  /// rows x cols lattice with nearest-neighbor edges, row-major ids.
  static LabeledGraph grid_graph(std::size_t rows, std::size_t cols) {
    LabeledGraph g(rows * cols);
    auto id = [cols](std::size_t r, std::size_t c) {
      return static_cast<VertexId>(r * cols + c);
    };
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (c + 1 < cols) {
          g.add_edge(id(r, c), id(r, c + 1));
        }
        if (r + 1 < rows) {
          g.add_edge(id(r, c), id(r + 1, c));
        }
      }
    }
    return g;
  }

  static LabeledGraph complete_graph(std::size_t n) {
    LabeledGraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        g.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(j));
      }
    }
    return g;
  }

  static LabeledGraph cycle_graph(std::size_t n) {
    LabeledGraph g = path_graph(n);
    if (n >= 3) {
      g.add_edge(0, static_cast<VertexId>(n - 1));
    }
    return g;
  }

  /// Ids live in [0, id_bound()); some of them may be dead.
  std::size_t id_bound() const { return adj_.size(); }
  std::size_t vertex_count() const { return live_count_; }
  std::size_t edge_count() const { return edge_count_; }

  bool is_live(VertexId v) const {
    return v < alive_.size() && alive_[v] != 0;
  }

  void require_live(VertexId v) const {
    if (!is_live(v)) {
      throw InvalidVertexError("vertex " + std::to_string(v) +
                               " is not a live vertex");
    }
  }

  bool has_edge(VertexId u, VertexId v) const {
    if (!is_live(u) || !is_live(v)) {
      return false;
    }
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

  std::span<const VertexId> neighbors(VertexId v) const {
    require_live(v);
    return adj_[v];
  }

  std::size_t degree(VertexId v) const { return neighbors(v).size(); }

  std::vector<VertexId> live_vertices() const {
    std::vector<VertexId> out;
    out.reserve(live_count_);
    for (VertexId v = 0; v < adj_.size(); ++v) {
      if (alive_[v]) {
        out.push_back(v);
      }
    }
    return out;
  }

  VertexId add_vertex() {
    adj_.emplace_back();
    alive_.push_back(1);
    ++live_count_;
    return static_cast<VertexId>(adj_.size() - 1);
  }

  void add_edge(VertexId u, VertexId v) {
    require_live(u);
    require_live(v);
    if (u == v) {
      throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    }
    if (has_edge(u, v)) {
      throw std::invalid_argument("duplicate edge " + std::to_string(u) + "-" +
                                  std::to_string(v));
    }
    insert_sorted(adj_[u], v);
    insert_sorted(adj_[v], u);
    ++edge_count_;
  }

  /// Returns false when the edge was not present.
  bool remove_edge(VertexId u, VertexId v) {
    require_live(u);
    require_live(v);
    if (!has_edge(u, v)) {
      return false;
    }
    erase_sorted(adj_[u], v);
    erase_sorted(adj_[v], u);
    --edge_count_;
    return true;
  }

  void toggle_edge(VertexId u, VertexId v) {
    if (has_edge(u, v)) {
      remove_edge(u, v);
    } else {
      add_edge(u, v);
    }
  }

  /// Marks v dead and strips its incident edges. Ids of other vertices are
  /// unaffected.
  void remove_vertex(VertexId v) {
    require_live(v);
    for (VertexId w : adj_[v]) {
      erase_sorted(adj_[w], v);
      --edge_count_;
    }
    adj_[v].clear();
    alive_[v] = 0;
    --live_count_;
  }

  bool operator==(const LabeledGraph& other) const {
    return adj_ == other.adj_ && alive_ == other.alive_;
  }

private:
  static void insert_sorted(std::vector<VertexId>& list, VertexId v) {
    list.insert(std::lower_bound(list.begin(), list.end(), v), v);
  }

  static void erase_sorted(std::vector<VertexId>& list, VertexId v) {
    auto it = std::lower_bound(list.begin(), list.end(), v);
    if (it != list.end() && *it == v) {
      list.erase(it);
    }
  }

  std::vector<std::vector<VertexId>> adj_;
  std::vector<std::uint8_t> alive_;
  std::size_t live_count_ = 0;
  std::size_t edge_count_ = 0;
};

/// Partition of the live vertices into maximal connected sets, ordered by
/// smallest contained vertex id; each set is sorted ascending.
struct ComponentPartition {
  std::vector<std::vector<VertexId>> components;

  std::size_t size() const { return components.size(); }
};

/// Hop distances from a set of source vertices; -1 marks unreachable or dead
/// ids. Shared by the metric layers, which all run on unweighted graphs.
inline std::vector<int> bfs_distances(const LabeledGraph& g,
                                      std::span<const VertexId> sources) {
  std::vector<int> dist(g.id_bound(), -1);
  std::vector<VertexId> queue;
  queue.reserve(g.vertex_count());
  for (VertexId s : sources) {
    g.require_live(s);
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId u = queue[head];
    for (VertexId w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

/// Minimum hop count between u and v, or nullopt when no path exists.
inline std::optional<int> shortest_path_distance(const LabeledGraph& g,
                                                 VertexId u, VertexId v) {
  g.require_live(u);
  g.require_live(v);
  if (u == v) {
    return 0;
  }
  const VertexId src[] = {u};
  const std::vector<int> dist = bfs_distances(g, src);
  if (dist[v] < 0) {
    return std::nullopt;
  }
  return dist[v];
}

inline ComponentPartition connected_components(const LabeledGraph& g) {
  ComponentPartition out;
  std::vector<std::uint8_t> seen(g.id_bound(), 0);
  for (VertexId start = 0; start < g.id_bound(); ++start) {
    if (!g.is_live(start) || seen[start]) {
      continue;
    }
    std::vector<VertexId> comp{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (VertexId w : g.neighbors(comp[head])) {
        if (!seen[w]) {
          seen[w] = 1;
          comp.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.components.push_back(std::move(comp));
  }
  return out;
}

namespace detail {

/// Dinic max-flow on a small integer-capacity digraph.
class MaxFlow {
public:
  explicit MaxFlow(std::size_t n) : heads_(n) {}

  void add_arc(int from, int to, int cap) {
    heads_[static_cast<std::size_t>(from)].push_back(
        static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap});
    heads_[static_cast<std::size_t>(to)].push_back(
        static_cast<int>(arcs_.size()));
    arcs_.push_back({from, 0});
  }

  int run(int s, int t) {
    int flow = 0;
    while (build_levels(s, t)) {
      iter_.assign(heads_.size(), 0);
      for (;;) {
        const int pushed = augment(s, t, std::numeric_limits<int>::max());
        if (pushed == 0) {
          break;
        }
        flow += pushed;
      }
    }
    return flow;
  }

private:
  struct Arc {
    int to;
    int cap;
  };

  bool build_levels(int s, int t) {
    level_.assign(heads_.size(), -1);
    level_[static_cast<std::size_t>(s)] = 0;
    std::vector<int> queue{s};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      for (int a : heads_[static_cast<std::size_t>(u)]) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap > 0 && level_[static_cast<std::size_t>(arc.to)] < 0) {
          level_[static_cast<std::size_t>(arc.to)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push_back(arc.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  int augment(int u, int t, int limit) {
    if (u == t || limit == 0) {
      return limit;
    }
    auto& cursor = iter_[static_cast<std::size_t>(u)];
    for (; cursor < heads_[static_cast<std::size_t>(u)].size(); ++cursor) {
      const int a = heads_[static_cast<std::size_t>(u)][cursor];
      Arc& arc = arcs_[static_cast<std::size_t>(a)];
      if (arc.cap <= 0 ||
          level_[static_cast<std::size_t>(arc.to)] !=
              level_[static_cast<std::size_t>(u)] + 1) {
        continue;
      }
      const int pushed = augment(arc.to, t, std::min(limit, arc.cap));
      if (pushed > 0) {
        arc.cap -= pushed;
        arcs_[static_cast<std::size_t>(a ^ 1)].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<int>> heads_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

} // namespace detail

/// Maximum number of s-t paths sharing no internal vertices (Menger's
/// kappa(s,t)).
///
/// Computed as unit-capacity max-flow on the vertex-split digraph: every
/// vertex except s and t becomes an in/out pair joined by a unit arc, each
/// undirected edge becomes a pair of directed unit arcs. A direct s-t edge
/// counts as one path.
inline int max_vertex_disjoint_paths(const LabeledGraph& g, VertexId s,
                                     VertexId t) {
  g.require_live(s);
  g.require_live(t);
  if (s == t) {
    throw std::invalid_argument("vertex-disjoint paths need distinct endpoints");
  }

  const std::vector<VertexId> live = g.live_vertices();
  std::vector<int> in_node(g.id_bound(), -1);
  std::vector<int> out_node(g.id_bound(), -1);
  int next = 0;
  for (VertexId v : live) {
    if (v == s || v == t) {
      in_node[v] = out_node[v] = next++;
    } else {
      in_node[v] = next++;
      out_node[v] = next++;
    }
  }

  detail::MaxFlow flow(static_cast<std::size_t>(next));
  for (VertexId v : live) {
    if (v != s && v != t) {
      flow.add_arc(in_node[v], out_node[v], 1);
    }
  }
  for (VertexId u : live) {
    for (VertexId w : g.neighbors(u)) {
      if (u < w) {
        flow.add_arc(out_node[u], in_node[w], 1);
        flow.add_arc(out_node[w], in_node[u], 1);
      }
    }
  }
  return flow.run(out_node[s], in_node[t]);
}

/// Edge-list text format: header line "n <vertex_count>", then one "u v"
/// pair per line. Dead vertices are not representable; callers serialize
/// intact graphs.
inline std::string to_edge_list(const LabeledGraph& g) {
  std::ostringstream out;
  out << "n " << g.id_bound() << "\n";
  for (VertexId u = 0; u < g.id_bound(); ++u) {
    if (!g.is_live(u)) {
      continue;
    }
    for (VertexId w : g.neighbors(u)) {
      if (u < w) {
        out << u << " " << w << "\n";
      }
    }
  }
  return out.str();
}

inline LabeledGraph graph_from_edge_list(std::istream& in) {
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag) || tag != "n" || !(in >> n)) {
    throw std::invalid_argument("edge list must start with 'n <vertex_count>'");
  }
  LabeledGraph g(n);
  VertexId u = 0;
  VertexId v = 0;
  while (in >> u) {
    if (!(in >> v)) {
      throw std::invalid_argument("dangling vertex id in edge list");
    }
    g.add_edge(u, v);
  }
  if (!in.eof()) {
    throw std::invalid_argument("malformed edge list line");
  }
  return g;
}

inline LabeledGraph graph_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  return graph_from_edge_list(in);
}

} // namespace enttopo
