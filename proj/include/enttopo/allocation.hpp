#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enttopo/errors.hpp"
#include "enttopo/graph.hpp"
#include "enttopo/rng.hpp"
#include "enttopo/topology.hpp"

namespace enttopo {

/// Annealer configuration. The defaults reproduce the published setup
/// (T0 = 10, cooling 0.99, 5000 iterations); tests pin them.
struct SAParams {
  double initial_temperature = 10.0;
  double cooling_rate = 0.99;
  int iterations = 5000;
};

enum class Strategy { clustered, random_uniform, optimized };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::clustered: return "clustered";
    case Strategy::random_uniform: return "random";
    case Strategy::optimized: return "optimized";
  }
  return "?";
}

inline std::optional<Strategy> strategy_from_string(const std::string& s) {
  if (s == "clustered") return Strategy::clustered;
  if (s == "random") return Strategy::random_uniform;
  if (s == "optimized") return Strategy::optimized;
  return std::nullopt;
}

struct AllocationSpec {
  Strategy strategy = Strategy::optimized;
  NodeId node_count = 1;
  std::uint64_t seed = 0;
  std::optional<SAParams> sa_params;
};

/// Maintains the C x C inter-node distance matrix of a coloring over a fixed
/// graph, with O(2 BFS) updates when two vertices swap colors. The annealer
/// runs on this; a full recompute is kept as the reference the incremental
/// path is tested against.
class InterNodeDistanceMatrix {
public:
  InterNodeDistanceMatrix(const LabeledGraph& g, std::vector<NodeId> colors,
                          NodeId node_count)
      : g_(&g), colors_(std::move(colors)), node_count_(node_count),
        dist_(static_cast<std::size_t>(node_count) * node_count, -1) {
    recompute();
  }

  const std::vector<NodeId>& colors() const { return colors_; }
  NodeId color_of(VertexId v) const { return colors_[v]; }

  int distance(NodeId a, NodeId b) const { return dist_[index(a, b)]; }

  void recompute() {
    for (NodeId c = 0; c < node_count_; ++c) {
      recompute_row(c);
    }
  }

  /// max_c D_c over classes with at least one reachable peer.
  int objective() const {
    int worst = -1;
    for (NodeId c = 0; c < node_count_; ++c) {
      worst = std::max(worst, worst_of(c));
    }
    if (worst < 0) {
      throw DegenerateTopologyError("objective undefined: no connected pair "
                                    "of nonempty classes");
    }
    return worst;
  }

  /// Secondary key for best-seen tracking: the sum of all D_c.
  long long worst_sum() const {
    long long sum = 0;
    for (NodeId c = 0; c < node_count_; ++c) {
      const int w = worst_of(c);
      if (w > 0) {
        sum += w;
      }
    }
    return sum;
  }

  struct SwapSnapshot {
    VertexId u = 0;
    VertexId v = 0;
    NodeId color_u = 0;
    NodeId color_v = 0;
    std::vector<int> row_u;
    std::vector<int> row_v;
  };

  /// Swaps the colors of u and v and refreshes the two affected rows.
  /// Returns the state needed to undo the move.
  SwapSnapshot swap_colors(VertexId u, VertexId v) {
    SwapSnapshot snap;
    snap.u = u;
    snap.v = v;
    snap.color_u = colors_[u];
    snap.color_v = colors_[v];
    snap.row_u = copy_row(snap.color_u);
    snap.row_v = copy_row(snap.color_v);
    std::swap(colors_[u], colors_[v]);
    recompute_row(snap.color_u);
    recompute_row(snap.color_v);
    return snap;
  }

  void undo(const SwapSnapshot& snap) {
    std::swap(colors_[snap.u], colors_[snap.v]);
    paste_row(snap.color_u, snap.row_u);
    paste_row(snap.color_v, snap.row_v);
  }

private:
  std::size_t index(NodeId a, NodeId b) const {
    return static_cast<std::size_t>(a) * node_count_ + b;
  }

  int worst_of(NodeId c) const {
    int worst = -1;
    for (NodeId c2 = 0; c2 < node_count_; ++c2) {
      if (c2 != c) {
        worst = std::max(worst, dist_[index(c, c2)]);
      }
    }
    return worst;
  }

  std::vector<int> copy_row(NodeId c) const {
    std::vector<int> row(node_count_);
    for (NodeId c2 = 0; c2 < node_count_; ++c2) {
      row[c2] = dist_[index(c, c2)];
    }
    return row;
  }

  void paste_row(NodeId c, const std::vector<int>& row) {
    for (NodeId c2 = 0; c2 < node_count_; ++c2) {
      dist_[index(c, c2)] = row[c2];
      dist_[index(c2, c)] = row[c2];
    }
    dist_[index(c, c)] = 0;
  }

  void recompute_row(NodeId c) {
    sources_.clear();
    for (VertexId v = 0; v < colors_.size(); ++v) {
      if (colors_[v] == c && g_->is_live(v)) {
        sources_.push_back(v);
      }
    }
    std::vector<int> row(node_count_, -1);
    if (!sources_.empty()) {
      const std::vector<int> dist = bfs_distances(*g_, sources_);
      for (VertexId v = 0; v < colors_.size(); ++v) {
        if (!g_->is_live(v) || dist[v] < 0) {
          continue;
        }
        const NodeId c2 = colors_[v];
        if (c2 == c) {
          continue;
        }
        int& cell = row[c2];
        if (cell < 0 || dist[v] < cell) {
          cell = dist[v];
        }
      }
    }
    row[c] = 0;
    paste_row(c, row);
  }

  const LabeledGraph* g_;
  std::vector<NodeId> colors_;
  NodeId node_count_;
  std::vector<int> dist_;
  std::vector<VertexId> sources_;
};

/// Row-major contiguous blocks, block i colored i; the first (n mod C) blocks
/// take the extra vertex. Fully deterministic.
inline Coloring allocate_clustered(const LabeledGraph& g, NodeId c_count) {
  if (c_count == 0) {
    throw std::invalid_argument("need at least one node");
  }
  const std::vector<VertexId> live = g.live_vertices();
  if (live.size() < c_count) {
    throw std::invalid_argument("more nodes than vertices: " +
                                std::to_string(c_count) + " > " +
                                std::to_string(live.size()));
  }
  const std::size_t base = live.size() / c_count;
  const std::size_t rem = live.size() % c_count;
  std::vector<NodeId> assignment(g.id_bound(), 0);
  std::size_t pos = 0;
  for (NodeId c = 0; c < c_count; ++c) {
    const std::size_t len = base + (c < rem ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i) {
      assignment[live[pos++]] = c;
    }
  }
  return Coloring(std::move(assignment), c_count);
}

/// Every vertex gets an i.i.d. uniform node id. Empty classes are possible.
inline Coloring allocate_random(const LabeledGraph& g, NodeId c_count,
                                std::uint64_t seed) {
  if (c_count == 0) {
    throw std::invalid_argument("need at least one node");
  }
  Rng rng(seed);
  std::vector<NodeId> assignment(g.id_bound(), 0);
  for (VertexId v = 0; v < g.id_bound(); ++v) {
    if (g.is_live(v)) {
      assignment[v] = static_cast<NodeId>(rng.below(c_count));
    }
  }
  return Coloring(std::move(assignment), c_count);
}

/// Simulated annealing on the min-max inter-node distance.
///
/// Starts from a seeded random balanced coloring (class sizes n/C, the
/// remainder spread over the first classes). The proposal swaps the colors of
/// two uniformly chosen vertices of different colors, which preserves the
/// class-size multiset, so every intermediate coloring honors the per-node
/// memory bound. Accepts when the objective does not worsen, otherwise with
/// probability exp(-delta/T); T shrinks by the cooling rate each iteration.
/// Returns the best coloring seen, with ties broken by the sum of all D_c.
inline Coloring allocate_optimized(const LabeledGraph& g, NodeId c_count,
                                   std::uint64_t seed,
                                   const SAParams& params = {}) {
  if (c_count == 0) {
    throw std::invalid_argument("need at least one node");
  }
  if (params.cooling_rate <= 0.0 || params.cooling_rate >= 1.0) {
    throw std::invalid_argument("cooling rate must lie in (0,1)");
  }
  if (params.iterations < 0 || params.initial_temperature <= 0.0) {
    throw std::invalid_argument("bad annealing parameters");
  }
  const std::vector<VertexId> live = g.live_vertices();
  if (live.size() < c_count) {
    throw std::invalid_argument("more nodes than vertices: " +
                                std::to_string(c_count) + " > " +
                                std::to_string(live.size()));
  }

  Rng rng(seed);
  // balanced color multiset, shuffled
  std::vector<NodeId> pool;
  pool.reserve(live.size());
  const std::size_t base = live.size() / c_count;
  const std::size_t rem = live.size() % c_count;
  for (NodeId c = 0; c < c_count; ++c) {
    const std::size_t len = base + (c < rem ? 1 : 0);
    pool.insert(pool.end(), len, c);
  }
  rng.shuffle(pool);

  std::vector<NodeId> assignment(g.id_bound(), 0);
  for (std::size_t i = 0; i < live.size(); ++i) {
    assignment[live[i]] = pool[i];
  }
  if (c_count < 2 || live.size() < 2) {
    return Coloring(std::move(assignment), c_count);
  }

  InterNodeDistanceMatrix matrix(g, assignment, c_count);
  int cur_obj = matrix.objective();
  long long cur_tie = matrix.worst_sum();
  std::vector<NodeId> best = matrix.colors();
  int best_obj = cur_obj;
  long long best_tie = cur_tie;

  double temperature = params.initial_temperature;
  for (int iter = 0; iter < params.iterations; ++iter) {
    VertexId u = live[rng.below(live.size())];
    VertexId v = live[rng.below(live.size())];
    while (matrix.color_of(u) == matrix.color_of(v)) {
      u = live[rng.below(live.size())];
      v = live[rng.below(live.size())];
    }
    const auto snap = matrix.swap_colors(u, v);
    const int new_obj = matrix.objective();
    const long long new_tie = matrix.worst_sum();
    const int delta = new_obj - cur_obj;
    const bool accept =
        delta <= 0 ||
        rng.unit() < std::exp(-static_cast<double>(delta) / temperature);
    if (accept) {
      cur_obj = new_obj;
      cur_tie = new_tie;
      if (new_obj < best_obj || (new_obj == best_obj && new_tie < best_tie)) {
        best = matrix.colors();
        best_obj = new_obj;
        best_tie = new_tie;
      }
    } else {
      matrix.undo(snap);
    }
    temperature *= params.cooling_rate;
  }

  return Coloring(std::move(best), c_count);
}

inline Coloring allocate(const LabeledGraph& g, const AllocationSpec& spec) {
  switch (spec.strategy) {
    case Strategy::clustered:
      return allocate_clustered(g, spec.node_count);
    case Strategy::random_uniform:
      return allocate_random(g, spec.node_count, spec.seed);
    case Strategy::optimized:
      return allocate_optimized(g, spec.node_count, spec.seed,
                                spec.sa_params.value_or(SAParams{}));
  }
  throw std::invalid_argument("unknown strategy");
}

} // namespace enttopo
