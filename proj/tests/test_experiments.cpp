#include <catch2/catch.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "enttopo/experiments.hpp"

using namespace enttopo;

namespace {

/// CSV text with the trailing wall_ms column stripped from every line.
std::string data_columns(const ResultTable& table) {
  std::ostringstream raw;
  write_csv(table, raw);
  std::istringstream in(raw.str());
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << "\n";
  }
  return out.str();
}

ExperimentConfig small_static_config() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::static_eval;
  cfg.node_count = 4;
  cfg.lattices = {{2, 4}};
  cfg.strategies = {Strategy::optimized, Strategy::random_uniform};
  cfg.trials = 3;
  cfg.seed = 11;
  cfg.sa_params.iterations = 200;
  return cfg;
}

} // namespace

TEST_CASE("config validation points at the offending field", "[experiments]") {
  ExperimentConfig cfg = small_static_config();

  SECTION("lattice too small for the node count") {
    cfg.lattices = {{1, 3}};
    try {
      validate(cfg);
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      REQUIRE(e.field() == "lattice_list");
    }
  }
  SECTION("missing failure budget") {
    cfg.experiment = ExperimentKind::resilience;
    try {
      validate(cfg);
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      REQUIRE(e.field() == "failures_max");
    }
  }
  SECTION("failure budget must stay below the node count") {
    cfg.experiment = ExperimentKind::resilience;
    cfg.failures_max = 4;
    REQUIRE_THROWS_AS(validate(cfg), ConfigError);
  }
  SECTION("bad cooling rate") {
    cfg.sa_params.cooling_rate = 0.0;
    REQUIRE_THROWS_AS(validate(cfg), ConfigError);
  }
}

TEST_CASE("config JSON overlay", "[experiments]") {
  ExperimentConfig cfg;
  const nlohmann::json j = {
      {"experiment", "static-eval"},
      {"node_count", 6},
      {"lattice_list", {{2, 3}, {3, 2}}},
      {"strategies", {"clustered"}},
      {"trials", 7},
      {"seed", 99},
      {"sa_params", {{"iterations", 123}}},
  };
  config_overlay_json(cfg, j);
  REQUIRE(cfg.node_count == 6);
  REQUIRE(cfg.lattices ==
          std::vector<std::pair<int, int>>{{2, 3}, {3, 2}});
  REQUIRE(cfg.strategies == std::vector<Strategy>{Strategy::clustered});
  REQUIRE(cfg.trials == 7);
  REQUIRE(cfg.seed == 99);
  REQUIRE(cfg.sa_params.iterations == 123);
  REQUIRE(cfg.sa_params.cooling_rate == 0.99); // untouched default

  SECTION("unknown keys are rejected") {
    REQUIRE_THROWS_AS(config_overlay_json(cfg, {{"latices", 1}}), ConfigError);
  }
  SECTION("round trips through to_json") {
    ExperimentConfig twin;
    config_overlay_json(twin, config_to_json(cfg));
    REQUIRE(config_to_json(twin) == config_to_json(cfg));
  }
  SECTION("presets are valid configs") {
    for (const char* name : {"fig5", "fig6", "fig7", "fig8", "verify"}) {
      REQUIRE_NOTHROW(validate(preset(name)));
    }
    REQUIRE_THROWS_AS(preset("fig9"), ConfigError);
  }
}

TEST_CASE("static evaluation tables", "[experiments]") {
  const ExperimentConfig cfg = small_static_config();
  const ResultTable table = run_static_eval(cfg, 2);

  SECTION("row counts and seed law") {
    int raws = 0;
    for (const ResultRow& r : table.rows) {
      if (r.kind == "raw") {
        ++raws;
        REQUIRE(*r.seed == cfg.seed + static_cast<std::uint64_t>(*r.trial));
      }
    }
    REQUIRE(raws == 2 * 3); // strategies x trials
  }
  SECTION("aggregates are recomputable from the raw rows") {
    for (const ResultRow& agg : table.rows) {
      if (agg.kind != "mean" || !agg.objective) {
        continue;
      }
      double sum = 0;
      int count = 0;
      for (const ResultRow& r : table.rows) {
        if (r.kind == "raw" && r.strategy == agg.strategy && r.objective) {
          sum += *r.objective;
          ++count;
        }
      }
      REQUIRE(count > 0);
      REQUIRE(*agg.objective == Approx(sum / count));
    }
  }
  SECTION("single trial reports zero std") {
    ExperimentConfig one = cfg;
    one.trials = 1;
    one.strategies = {Strategy::clustered};
    const ResultTable t = run_static_eval(one);
    bool saw_std = false;
    for (const ResultRow& r : t.rows) {
      if (r.kind == "std") {
        saw_std = true;
        REQUIRE(*r.objective == 0.0);
      }
    }
    REQUIRE(saw_std);
  }
  SECTION("reruns are byte-identical apart from wall time") {
    const ResultTable again = run_static_eval(cfg, 4);
    REQUIRE(data_columns(table) == data_columns(again));
  }
  SECTION("bijective lattices pin the objective to the diameter") {
    ExperimentConfig diag = cfg;
    diag.node_count = 8;
    diag.lattices = {{2, 4}};
    diag.strategies = {Strategy::optimized};
    const ResultTable t = run_static_eval(diag);
    for (const ResultRow& r : t.rows) {
      if (r.kind == "raw") {
        REQUIRE(*r.objective == 4.0); // (2-1)+(4-1)
      }
      if (r.kind == "std") {
        REQUIRE(*r.objective == 0.0);
      }
    }
  }
}

TEST_CASE("memory comparison table", "[experiments]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::memory_compare;
  cfg.node_counts = {2, 10, 20};
  cfg.class_sizes = {1, 2};
  cfg.sa_params.iterations = 50;
  const ResultTable table = run_memory_compare(cfg);

  auto find_q = [&](const std::string& strategy, int c,
                    std::optional<int> k) -> double {
    for (const ResultRow& r : table.rows) {
      if (r.strategy == strategy && r.node_count == c && r.class_size == k) {
        return *r.q_total;
      }
    }
    FAIL("row not found");
    return -1;
  };

  REQUIRE(find_q("all-to-all", 2, std::nullopt) == 6.0);
  REQUIRE(find_q("all-to-all", 10, std::nullopt) == 270.0);
  REQUIRE(find_q("all-to-all", 20, std::nullopt) == 1140.0);
  REQUIRE(find_q("optimized", 2, 1) == 6.0);
  REQUIRE(find_q("optimized", 20, 1) == 60.0);
  REQUIRE(find_q("optimized", 20, 2) == 120.0);
  REQUIRE(find_q("optimized", 10, 2) == 60.0);
}

TEST_CASE("resilience tables", "[experiments]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::resilience;
  cfg.node_count = 8;
  cfg.lattices = {{4, 4}};
  cfg.strategies = {Strategy::clustered};
  cfg.trials = 4;
  cfg.seed = 5;
  cfg.failures_max = 7;
  cfg.sa_params.iterations = 100;
  const ResultTable table = run_resilience(cfg, 2);

  SECTION("one row per trial and failure count") {
    int raws = 0;
    for (const ResultRow& r : table.rows) {
      if (r.kind == "raw") {
        ++raws;
        REQUIRE(r.failures >= 1);
        REQUIRE(r.failures <= 7);
      }
    }
    REQUIRE(raws == 4 * 7);
  }
  SECTION("with seven of eight nodes gone, at most one pair can talk") {
    for (const ResultRow& r : table.rows) {
      if (r.kind == "raw" && r.failures == 7) {
        // a single surviving node cannot form an inter-node pair
        REQUIRE(*r.kappa == 0.0);
      }
    }
  }
  SECTION("zero failures equals the static metrics") {
    ExperimentConfig zero = cfg;
    zero.failures_max = 0;
    const ResultTable t = run_resilience(zero);
    const LabeledGraph g = LabeledGraph::grid_graph(4, 4);
    const EntanglementTopology intact(g, allocate_clustered(g, 8), 1, true);
    for (const ResultRow& r : t.rows) {
      if (r.kind == "raw") {
        REQUIRE(r.failures == 0);
        REQUIRE(*r.kappa == Approx(kappa_bar(intact)));
        REQUIRE(*r.d == Approx(minmax_objective(intact)));
      }
    }
  }
  SECTION("deterministic") {
    const ResultTable again = run_resilience(cfg, 4);
    REQUIRE(data_columns(table) == data_columns(again));
  }
}

TEST_CASE("graph-state verification harness", "[experiments]") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::graphstate_verify;
  cfg.verify_graphs = 12;
  cfg.verify_max_qubits = 6;
  cfg.seed = 21;

  SECTION("clean rules pass everywhere") {
    const ResultTable table = run_graphstate_verify(cfg);
    for (const ResultRow& r : table.rows) {
      if (r.kind == "raw") {
        REQUIRE(*r.objective == 1.0);
      }
      if (r.kind == "mean") {
        REQUIRE(*r.objective == 1.0);
      }
    }
  }
  SECTION("a corrupted rule is reported with its triple") {
    // drop one edge from every non-edgeless result graph
    const VerifyCorruptionHook corrupt = [](LabeledGraph& g) {
      for (VertexId u = 0; u < g.id_bound(); ++u) {
        if (g.is_live(u) && !g.neighbors(u).empty()) {
          g.remove_edge(u, g.neighbors(u).front());
          return;
        }
      }
    };
    const ResultTable table = run_graphstate_verify(cfg, corrupt);
    bool saw_failure = false;
    for (const ResultRow& r : table.rows) {
      if (r.kind == "raw" && *r.objective == 0.0) {
        saw_failure = true;
        REQUIRE(r.note.find("basis=") != std::string::npos);
        REQUIRE(r.note.find("qubit=") != std::string::npos);
      }
    }
    REQUIRE(saw_failure);
  }
}

TEST_CASE("csv shape", "[experiments]") {
  REQUIRE(std::string(csv_header()).rfind("kind,experiment,", 0) == 0);
  REQUIRE(std::string(csv_header()).find("wall_ms") != std::string::npos);

  ResultTable table;
  ResultRow row;
  row.experiment = "static-eval";
  row.strategy = "optimized";
  row.objective = 3.25;
  table.rows.push_back(row);
  std::ostringstream out;
  write_csv(table, out);
  const std::string text = out.str();
  REQUIRE(text.find("raw,static-eval,,,,,optimized,,,-1,3.25,,,,,,") !=
          std::string::npos);
}
