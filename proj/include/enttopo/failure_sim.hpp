#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "enttopo/errors.hpp"
#include "enttopo/graph.hpp"
#include "enttopo/rng.hpp"
#include "enttopo/topology.hpp"

namespace enttopo {

/// Removes node c from the topology.
///
/// Undecorated: the node's qubits are lost and every logical neighbor is
/// Z-measured away with them, so the hole includes the one-hop boundary.
/// Decorated: the decoration layer absorbs the Z measurements and only the
/// node's own vertices disappear; neighbors and their mutual links survive.
inline EntanglementTopology fail_node(const EntanglementTopology& t, NodeId c) {
  if (c >= t.node_count()) {
    throw std::invalid_argument("unknown node " + std::to_string(c));
  }
  const std::vector<VertexId> owned =
      t.coloring().color_class(t.connectivity(), c);
  if (owned.empty()) {
    throw std::invalid_argument("node " + std::to_string(c) +
                                " has already failed (no live vertices)");
  }
  LabeledGraph g = t.connectivity();
  std::set<VertexId> victims(owned.begin(), owned.end());
  if (!t.decorated()) {
    for (VertexId v : owned) {
      for (VertexId w : g.neighbors(v)) {
        victims.insert(w);
      }
    }
  }
  for (VertexId v : victims) {
    g.remove_vertex(v);
  }
  return t.with_connectivity(std::move(g));
}

/// Restores connectivity with local operations: whenever a surviving node's
/// class spans several components, a star of same-colored edges is added from
/// its lowest-id vertex to one representative per other spanned component.
/// Nodes are processed in ascending order against fresh component data, which
/// reaches the fixpoint (no class spans two components) in one sweep since
/// merges only grow components.
inline EntanglementTopology reheal(const EntanglementTopology& t) {
  LabeledGraph g = t.connectivity();
  std::vector<int> comp_of(g.id_bound(), -1);
  bool comp_valid = false;

  auto refresh_components = [&]() {
    std::fill(comp_of.begin(), comp_of.end(), -1);
    const ComponentPartition parts = connected_components(g);
    for (std::size_t i = 0; i < parts.components.size(); ++i) {
      for (VertexId v : parts.components[i]) {
        comp_of[v] = static_cast<int>(i);
      }
    }
    comp_valid = true;
  };

  for (NodeId c = 0; c < t.node_count(); ++c) {
    if (!comp_valid) {
      refresh_components();
    }
    const std::vector<VertexId> owned = t.coloring().color_class(g, c);
    if (owned.size() < 2) {
      continue;
    }
    // lowest-id vertex per spanned component, ascending by vertex id
    std::vector<VertexId> reps;
    std::set<int> seen;
    for (VertexId v : owned) {
      if (seen.insert(comp_of[v]).second) {
        reps.push_back(v);
      }
    }
    if (reps.size() < 2) {
      continue;
    }
    for (std::size_t i = 1; i < reps.size(); ++i) {
      g.add_edge(reps[0], reps[i]);
    }
    comp_valid = false;
  }
  return t.with_connectivity(std::move(g));
}

struct ComponentMetrics {
  double kappa_hat = 0.0;
  double d_hat = 0.0;
  /// Components with fewer than two node colors; they contribute to neither
  /// average.
  int excluded_components = 0;
  int qualifying_components = 0;
};

/// kappa between two explicit vertex sets via the virtual-terminal support
/// graph; shared by component_metrics.
inline int kappa_between_classes(const LabeledGraph& g,
                                 const std::vector<VertexId>& side_a,
                                 const std::vector<VertexId>& side_b) {
  LabeledGraph support = g;
  const VertexId s = support.add_vertex();
  const VertexId t = support.add_vertex();
  for (VertexId v : side_a) {
    support.add_edge(s, v);
  }
  for (VertexId v : side_b) {
    support.add_edge(t, v);
  }
  return max_vertex_disjoint_paths(support, s, t);
}

/// Per-component resilience metrics. For each connected component K_i hosting
/// at least two node colors, kappa-bar and the worst inter-node distance are
/// computed with the classes restricted to K_i; the returned values are the
/// means over those components. Paths and distances between vertices of one
/// component never leave it, so the computation can run on the full graph
/// with intersected classes.
inline ComponentMetrics component_metrics(const EntanglementTopology& t) {
  ComponentMetrics out;
  const LabeledGraph& g = t.connectivity();
  const ComponentPartition parts = connected_components(g);
  const Coloring& coloring = t.coloring();

  double kappa_sum = 0.0;
  double d_sum = 0.0;
  for (const std::vector<VertexId>& comp : parts.components) {
    std::vector<std::vector<VertexId>> classes(coloring.node_count());
    for (VertexId v : comp) {
      classes[coloring.node_of(v)].push_back(v);
    }
    std::vector<NodeId> present;
    for (NodeId c = 0; c < classes.size(); ++c) {
      if (!classes[c].empty()) {
        present.push_back(c);
      }
    }
    if (present.size() < 2) {
      ++out.excluded_components;
      continue;
    }

    long long kappa_total = 0;
    int worst_distance = 0;
    for (std::size_t i = 0; i < present.size(); ++i) {
      const std::vector<int> dist = bfs_distances(g, classes[present[i]]);
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        kappa_total += kappa_between_classes(g, classes[present[i]],
                                             classes[present[j]]);
        int pair_min = -1;
        for (VertexId v : classes[present[j]]) {
          if (dist[v] >= 0 && (pair_min < 0 || dist[v] < pair_min)) {
            pair_min = dist[v];
          }
        }
        worst_distance = std::max(worst_distance, pair_min);
      }
    }
    const double m = static_cast<double>(present.size());
    kappa_sum += 2.0 * static_cast<double>(kappa_total) / (m * (m - 1.0));
    d_sum += static_cast<double>(worst_distance);
    ++out.qualifying_components;
  }

  if (out.qualifying_components > 0) {
    out.kappa_hat = kappa_sum / out.qualifying_components;
    out.d_hat = d_sum / out.qualifying_components;
  }
  return out;
}

/// mean over qualifying components of kappa-bar restricted to the component;
/// 0 when no component hosts two colors.
inline double kappa_hat(const EntanglementTopology& t) {
  return component_metrics(t).kappa_hat;
}

/// mean over qualifying components of the worst inter-node distance inside
/// the component; 0 when no component qualifies.
inline double d_hat(const EntanglementTopology& t) {
  return component_metrics(t).d_hat;
}

struct StepRecord {
  LabeledGraph surviving_graph;
  ComponentPartition components;
  double kappa_hat = 0.0;
  double d_hat = 0.0;
  int excluded_components = 0;
};

struct FailureTrace {
  EntanglementTopology initial;
  std::vector<NodeId> failed_nodes;
  std::vector<StepRecord> steps;
};

/// Samples k distinct nodes (uniform, without replacement, from the nodes
/// that start out nonempty), fails them in order and records metrics after
/// each step, re-healing first when enabled. A sampled node whose class was
/// already consumed by an earlier undecorated cascade is a recorded no-op.
/// Deterministic given the seed.
inline FailureTrace run_failure_sequence(const EntanglementTopology& t,
                                         int k_failures, std::uint64_t seed,
                                         bool reheal_enabled) {
  std::vector<NodeId> candidates = t.nonempty_nodes();
  if (k_failures < 0 ||
      static_cast<std::size_t>(k_failures) >= candidates.size()) {
    throw std::invalid_argument(
        "failure count must stay below the surviving node count (" +
        std::to_string(candidates.size()) + ")");
  }

  Rng rng(seed);
  const std::vector<NodeId> order =
      rng.sample(std::move(candidates), static_cast<std::size_t>(k_failures));

  FailureTrace trace{t, order, {}};
  EntanglementTopology current = t;

  auto record = [&trace](const EntanglementTopology& topo) {
    const ComponentMetrics m = component_metrics(topo);
    trace.steps.push_back(StepRecord{topo.connectivity(),
                                     connected_components(topo.connectivity()),
                                     m.kappa_hat, m.d_hat,
                                     m.excluded_components});
  };

  if (k_failures == 0) {
    record(current);
    return trace;
  }
  for (NodeId c : order) {
    if (!current.coloring().color_class(current.connectivity(), c).empty()) {
      current = fail_node(current, c);
    }
    if (reheal_enabled) {
      current = reheal(current);
    }
    record(current);
  }
  return trace;
}

inline nlohmann::json trace_to_json(const FailureTrace& trace) {
  nlohmann::json j;
  j["failed_nodes"] = trace.failed_nodes;
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& step : trace.steps) {
    nlohmann::json s;
    std::vector<std::size_t> sizes;
    sizes.reserve(step.components.size());
    for (const auto& comp : step.components.components) {
      sizes.push_back(comp.size());
    }
    s["component_sizes"] = sizes;
    s["kappa_hat"] = step.kappa_hat;
    s["d_hat"] = step.d_hat;
    s["excluded_components"] = step.excluded_components;
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j;
}

} // namespace enttopo
