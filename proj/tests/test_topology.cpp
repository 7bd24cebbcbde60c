#include <catch2/catch.hpp>

#include <numeric>
#include <vector>

#include "enttopo/topology.hpp"
#include "oracles.hpp"

using namespace enttopo;

namespace {

/// coloring [0,1,2,...] truncated/cycled over the vertex ids
Coloring identity_coloring(std::size_t n) {
  std::vector<NodeId> assignment(n);
  std::iota(assignment.begin(), assignment.end(), 0);
  return Coloring(assignment, static_cast<NodeId>(n));
}

} // namespace

TEST_CASE("coloring basics", "[topology]") {
  const LabeledGraph g = LabeledGraph::path_graph(4);
  const Coloring coloring({0, 0, 1, 1}, 2);
  REQUIRE(coloring.color_class(g, 0) == std::vector<VertexId>{0, 1});
  REQUIRE(coloring.color_class(g, 1) == std::vector<VertexId>{2, 3});
  REQUIRE_THROWS_AS(Coloring({0, 3}, 2), std::invalid_argument);

  SECTION("classes track liveness") {
    LabeledGraph h = g;
    h.remove_vertex(2);
    REQUIRE(coloring.color_class(h, 1) == std::vector<VertexId>{3});
  }
}

TEST_CASE("topology constructors", "[topology]") {
  SECTION("snake with parallelism and decorations") {
    const auto t = build_snake(4, 3, true, Coloring({0, 1, 2, 3}, 4));
    REQUIRE(t.connectivity() == LabeledGraph::path_graph(4));
    REQUIRE(t.qubits_per_logical_vertex() == 9);
    REQUIRE(t.lattice_dims() == std::pair<int, int>{1, 4});
  }
  SECTION("single-vertex snake") {
    const auto t = build_snake(1, 1, false, Coloring({0}, 1));
    REQUIRE(t.connectivity().edge_count() == 0);
  }
  SECTION("snake of 20 nodes stores one qubit each") {
    const auto t = build_snake(20, 1, false, identity_coloring(20));
    const MemoryReport report = memory_report(t);
    for (long long q : report.per_node) {
      REQUIRE(q == 1);
    }
  }
  SECTION("1 x n lattice equals the snake") {
    const auto lattice = build_lattice(1, 6, 2, false, identity_coloring(6));
    const auto snake = build_snake(6, 2, false, identity_coloring(6));
    REQUIRE(lattice.connectivity() == snake.connectivity());
  }
  SECTION("coloring must cover the lattice") {
    REQUIRE_THROWS_AS(build_lattice(2, 3, 1, false, Coloring({0, 1}, 2)),
                      std::invalid_argument);
  }
}

TEST_CASE("inter-node distances", "[topology]") {
  SECTION("bijective path endpoints") {
    const auto t = build_snake(20, 1, false, identity_coloring(20));
    REQUIRE(inter_node_distance(t, 0, 19) == 19);
  }
  SECTION("adjacent vertices of distinct colors") {
    const auto t = build_snake(2, 1, false, Coloring({0, 1}, 2));
    REQUIRE(inter_node_distance(t, 0, 1) == 1);
  }
  SECTION("distance is the minimum over the class") {
    std::vector<NodeId> assignment(20, 2);
    assignment[0] = 0;
    assignment[10] = 0;
    assignment[11] = 1;
    const auto t = build_snake(20, 1, false, Coloring(assignment, 3));
    REQUIRE(inter_node_distance(t, 0, 1) == 1);
  }
  SECTION("symmetry") {
    Rng rng(5);
    const LabeledGraph g = LabeledGraph::grid_graph(3, 4);
    std::vector<NodeId> assignment(12);
    for (auto& c : assignment) {
      c = static_cast<NodeId>(rng.below(4));
    }
    const EntanglementTopology t(g, Coloring(assignment, 4), 1, false);
    for (NodeId a = 0; a < 4; ++a) {
      for (NodeId b = a + 1; b < 4; ++b) {
        const auto cls_a = t.coloring().color_class(g, a);
        const auto cls_b = t.coloring().color_class(g, b);
        if (cls_a.empty() || cls_b.empty()) {
          continue;
        }
        REQUIRE(inter_node_distance(t, a, b) == inter_node_distance(t, b, a));
      }
    }
  }
  SECTION("empty class errors") {
    const auto t = build_snake(3, 1, false, Coloring({0, 0, 1}, 3));
    REQUIRE_THROWS_AS(inter_node_distance(t, 0, 2), EmptyClassError);
  }
}

TEST_CASE("worst-case distance and objective", "[topology]") {
  SECTION("1x20 bijective") {
    const auto t = build_snake(20, 1, false, identity_coloring(20));
    REQUIRE(worst_inter_node_distance(t, 0).distance == 19);
    REQUIRE(minmax_objective(t) == 19);
  }
  SECTION("grid diameters for bijections") {
    const auto t45 = build_lattice(4, 5, 1, false, identity_coloring(20));
    REQUIRE(minmax_objective(t45) == 7);
    const auto t210 = build_lattice(2, 10, 1, false, identity_coloring(20));
    REQUIRE(minmax_objective(t210) == 10);
  }
  SECTION("two nodes on one edge") {
    const auto t = build_snake(2, 1, false, Coloring({0, 1}, 2));
    REQUIRE(worst_inter_node_distance(t, 0).distance == 1);
    REQUIRE(worst_inter_node_distance(t, 1).distance == 1);
  }
  SECTION("one big class and one singleton") {
    std::vector<NodeId> assignment(10, 0);
    assignment[7] = 1;
    const auto t = build_snake(10, 1, false, Coloring(assignment, 2));
    REQUIRE(minmax_objective(t) == 1); // vertices 6 and 8 touch the singleton
  }
  SECTION("any bijection achieves the diameter") {
    Rng rng(11);
    for (int round = 0; round < 10; ++round) {
      std::vector<NodeId> perm(12);
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      const auto t = build_lattice(3, 4, 1, false, Coloring(perm, 12));
      REQUIRE(minmax_objective(t) == 5); // (3-1)+(4-1)
    }
  }
  SECTION("degenerate topologies are rejected") {
    const auto t = build_snake(4, 1, false, Coloring({0, 0, 0, 0}, 1));
    REQUIRE_THROWS_AS(minmax_objective(t), DegenerateTopologyError);
  }
  SECTION("unreachable peers are excluded and flagged") {
    LabeledGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    const EntanglementTopology t(g, Coloring({0, 1, 2, 2}, 3), 1, false);
    const auto worst = worst_inter_node_distance(t, 0);
    REQUIRE(worst.distance == 1);
    REQUIRE(worst.excluded_pairs == 1);
  }
}

TEST_CASE("inter-node disjoint paths", "[topology]") {
  SECTION("adjacent singleton classes") {
    const auto t = build_snake(2, 1, false, Coloring({0, 1}, 2));
    REQUIRE(kappa_inter_node(t, 0, 1) == 1);
  }
  SECTION("corner classes of a 2xn grid") {
    // S_0 = left corners, S_1 = right corners; two parallel rows
    const std::size_t n = 5;
    std::vector<NodeId> assignment(2 * n, 2);
    assignment[0] = 0;
    assignment[n] = 0;
    assignment[n - 1] = 1;
    assignment[2 * n - 1] = 1;
    const auto t = build_lattice(2, n, 1, false, Coloring(assignment, 3));
    REQUIRE(kappa_inter_node(t, 0, 1) == 2);

    // cross-checked against the exhaustive oracle on the same support graph
    LabeledGraph support = t.connectivity();
    const VertexId s = support.add_vertex();
    const VertexId tt = support.add_vertex();
    support.add_edge(s, 0);
    support.add_edge(s, static_cast<VertexId>(n));
    support.add_edge(tt, static_cast<VertexId>(n - 1));
    support.add_edge(tt, static_cast<VertexId>(2 * n - 1));
    REQUIRE(oracles::max_disjoint_paths(support, s, tt) == 2);
  }
  SECTION("separated components have no paths") {
    LabeledGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    const EntanglementTopology t(g, Coloring({0, 0, 1, 1}, 2), 1, false);
    REQUIRE(kappa_inter_node(t, 0, 1) == 0);
  }
  SECTION("random colorings match the oracle") {
    Rng rng(606);
    for (int round = 0; round < 25; ++round) {
      const std::size_t n = 4 + rng.below(4);
      const LabeledGraph g = oracles::random_graph(rng, n, 0.5);
      std::vector<NodeId> assignment(n);
      for (auto& c : assignment) {
        c = static_cast<NodeId>(rng.below(2));
      }
      const EntanglementTopology t(g, Coloring(assignment, 2), 1, false);
      const auto s0 = t.coloring().color_class(g, 0);
      const auto s1 = t.coloring().color_class(g, 1);
      if (s0.empty() || s1.empty()) {
        continue;
      }
      LabeledGraph support = g;
      const VertexId s = support.add_vertex();
      const VertexId tt = support.add_vertex();
      for (VertexId v : s0) support.add_edge(s, v);
      for (VertexId v : s1) support.add_edge(tt, v);
      REQUIRE(kappa_inter_node(t, 0, 1) ==
              oracles::max_disjoint_paths(support, s, tt));
    }
  }
}

TEST_CASE("kappa-bar", "[topology]") {
  SECTION("bijective snake") {
    const auto t = build_snake(20, 1, false, identity_coloring(20));
    REQUIRE(kappa_bar(t) == Approx(1.0));
  }
  SECTION("two singletons joined by an edge") {
    const auto t = build_snake(2, 1, false, Coloring({0, 1}, 2));
    REQUIRE(kappa_bar(t) == Approx(1.0));
  }
  SECTION("empty classes are excluded from the average") {
    std::vector<NodeId> assignment(4, 0);
    assignment[2] = 1;
    assignment[3] = 1;
    const auto t = build_snake(4, 1, false, Coloring(assignment, 5));
    REQUIRE(kappa_bar(t) == Approx(1.0)); // only the pair (0,1) counts
  }
}

TEST_CASE("memory accounting", "[topology]") {
  SECTION("20 singleton nodes, decorated") {
    const auto t = build_snake(20, 1, true, identity_coloring(20));
    const MemoryReport report = memory_report(t);
    REQUIRE(report.per_node[0] == 3);
    REQUIRE(report.max_per_node == 3);
    REQUIRE(report.total == 60);
  }
  SECTION("class size two, decorated") {
    std::vector<NodeId> assignment(40);
    for (std::size_t v = 0; v < 40; ++v) {
      assignment[v] = static_cast<NodeId>(v / 2);
    }
    const auto t = build_snake(40, 1, true, Coloring(assignment, 20));
    REQUIRE(memory_report(t).total == 120);
  }
  SECTION("undecorated counts mu per vertex") {
    std::vector<NodeId> assignment(4, 0);
    assignment[2] = 1;
    assignment[3] = 1;
    const auto t = build_snake(4, 3, false, Coloring(assignment, 2));
    const MemoryReport report = memory_report(t);
    REQUIRE(report.per_node[0] == 6);
    REQUIRE(report.per_node[1] == 6);
  }
  SECTION("total is the factor times the live vertex count") {
    Rng rng(77);
    for (int round = 0; round < 10; ++round) {
      const std::size_t n = 5 + rng.below(20);
      std::vector<NodeId> assignment(n);
      for (auto& c : assignment) {
        c = static_cast<NodeId>(rng.below(4));
      }
      const int mu = 1 + static_cast<int>(rng.below(3));
      const bool decorated = rng.unit() < 0.5;
      const auto t =
          build_snake(n, mu, decorated, Coloring(assignment, 4));
      REQUIRE(memory_report(t).total ==
              static_cast<long long>((decorated ? 3 : 1) * mu * n));
    }
  }
}

TEST_CASE("all-to-all baseline", "[topology]") {
  REQUIRE(all_to_all_memory(2).total == 6);
  REQUIRE(all_to_all_memory(10).total == 270);
  REQUIRE(all_to_all_memory(20).total == 1140);
  REQUIRE(all_to_all_memory(20).per_node[0] == 57);
  REQUIRE_THROWS_AS(all_to_all_memory(1), std::invalid_argument);

  SECTION("quadratic vs linear gap") {
    // ratio of all-to-all total to a snake with class size k is (C-1)/k
    for (int c : {4, 10, 20}) {
      for (int k : {1, 2, 4}) {
        std::vector<NodeId> assignment(static_cast<std::size_t>(c * k));
        for (std::size_t v = 0; v < assignment.size(); ++v) {
          assignment[v] = static_cast<NodeId>(v / static_cast<std::size_t>(k));
        }
        const auto t = build_snake(static_cast<std::size_t>(c * k), 1, true,
                                   Coloring(assignment, static_cast<NodeId>(c)));
        const double ratio =
            static_cast<double>(all_to_all_memory(c).total) /
            static_cast<double>(memory_report(t).total);
        REQUIRE(ratio == Approx(static_cast<double>(c - 1) / k));
      }
    }
  }
}

TEST_CASE("topology JSON round trip", "[topology]") {
  const auto t = build_lattice(2, 3, 2, true, Coloring({0, 1, 2, 0, 1, 2}, 3));
  const nlohmann::json j = topology_to_json(t);
  REQUIRE(j.at("mu") == 2);
  REQUIRE(j.at("decorated") == true);
  REQUIRE(j.at("node_count") == 3);
  REQUIRE(j.at("dims")[0] == 2);
  REQUIRE(j.at("dims")[1] == 3);

  const EntanglementTopology back = topology_from_json(j);
  REQUIRE(back.connectivity() == t.connectivity());
  REQUIRE(back.coloring().assignment() == t.coloring().assignment());
  REQUIRE(back.mu() == t.mu());
  REQUIRE(back.decorated() == t.decorated());
  REQUIRE(back.lattice_dims() == t.lattice_dims());
}
