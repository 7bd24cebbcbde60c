#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "enttopo/allocation.hpp"
#include "enttopo/errors.hpp"
#include "enttopo/failure_sim.hpp"
#include "enttopo/graph_state.hpp"
#include "enttopo/rng.hpp"
#include "enttopo/statevector.hpp"
#include "enttopo/topology.hpp"
#include "enttopo/version.hpp"

namespace enttopo {

enum class ExperimentKind {
  static_eval,
  memory_compare,
  resilience,
  optimize,
  graphstate_verify,
};

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::static_eval: return "static-eval";
    case ExperimentKind::memory_compare: return "memory-compare";
    case ExperimentKind::resilience: return "resilience";
    case ExperimentKind::optimize: return "optimize";
    case ExperimentKind::graphstate_verify: return "graphstate-verify";
  }
  return "?";
}

inline std::optional<ExperimentKind> experiment_from_string(
    const std::string& s) {
  if (s == "static-eval") return ExperimentKind::static_eval;
  if (s == "memory-compare") return ExperimentKind::memory_compare;
  if (s == "resilience") return ExperimentKind::resilience;
  if (s == "optimize") return ExperimentKind::optimize;
  if (s == "graphstate-verify") return ExperimentKind::graphstate_verify;
  return std::nullopt;
}

/// Parameters for one experiment run. Trial i always draws seed (seed + i),
/// so any row can be replayed in isolation.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::static_eval;
  NodeId node_count = 20;
  std::vector<std::pair<int, int>> lattices;
  std::vector<Strategy> strategies{Strategy::optimized,
                                   Strategy::random_uniform,
                                   Strategy::clustered};
  int trials = 100;
  std::uint64_t seed = 1;
  int mu = 1;
  bool decorated = true;
  bool reheal = true;
  std::optional<int> failures_max;
  SAParams sa_params{};
  // memory-compare sweep
  std::vector<int> node_counts{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<int> class_sizes{1, 2, 3, 4};
  // graphstate-verify
  int verify_graphs = 200;
  int verify_max_qubits = 8;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) {
    throw ConfigError("trials", "must be at least 1");
  }
  if (cfg.mu < 1) {
    throw ConfigError("mu", "parallelism factor must be at least 1");
  }
  if (cfg.sa_params.cooling_rate <= 0.0 || cfg.sa_params.cooling_rate >= 1.0) {
    throw ConfigError("sa_params.cooling_rate", "must lie in (0,1)");
  }
  if (cfg.sa_params.initial_temperature <= 0.0) {
    throw ConfigError("sa_params.initial_temperature", "must be positive");
  }
  if (cfg.sa_params.iterations < 1) {
    throw ConfigError("sa_params.iterations", "must be at least 1");
  }
  switch (cfg.experiment) {
    case ExperimentKind::static_eval:
    case ExperimentKind::resilience:
    case ExperimentKind::optimize: {
      if (cfg.node_count < 2) {
        throw ConfigError("node_count", "need at least two nodes");
      }
      if (cfg.lattices.empty()) {
        throw ConfigError("lattice_list", "need at least one lattice");
      }
      for (const auto& [m, n] : cfg.lattices) {
        if (m < 1 || n < 1) {
          throw ConfigError("lattice_list", "dimensions must be positive");
        }
        if (static_cast<long long>(m) * n < cfg.node_count) {
          throw ConfigError("lattice_list",
                            std::to_string(m) + "x" + std::to_string(n) +
                                " has fewer vertices than nodes");
        }
      }
      if (cfg.strategies.empty()) {
        throw ConfigError("strategies", "need at least one strategy");
      }
      if (cfg.experiment == ExperimentKind::resilience) {
        if (!cfg.failures_max) {
          throw ConfigError("failures_max", "required for resilience runs");
        }
        if (*cfg.failures_max < 0 ||
            static_cast<NodeId>(*cfg.failures_max) >= cfg.node_count) {
          throw ConfigError("failures_max",
                            "must stay below the node count");
        }
      }
      break;
    }
    case ExperimentKind::memory_compare: {
      if (cfg.node_counts.empty()) {
        throw ConfigError("node_counts", "need at least one node count");
      }
      for (int c : cfg.node_counts) {
        if (c < 2) {
          throw ConfigError("node_counts", "every entry must be at least 2");
        }
      }
      if (cfg.class_sizes.empty()) {
        throw ConfigError("class_sizes", "need at least one class size");
      }
      for (int k : cfg.class_sizes) {
        if (k < 1) {
          throw ConfigError("class_sizes", "every entry must be at least 1");
        }
      }
      break;
    }
    case ExperimentKind::graphstate_verify: {
      if (cfg.verify_graphs < 1) {
        throw ConfigError("verify_graphs", "need at least one graph");
      }
      if (cfg.verify_max_qubits < 2 ||
          static_cast<std::size_t>(cfg.verify_max_qubits) >
              kStatevectorQubitCap) {
        throw ConfigError("verify_max_qubits",
                          "must lie in [2, " +
                              std::to_string(kStatevectorQubitCap) + "]");
      }
      break;
    }
  }
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = to_string(cfg.experiment);
  j["node_count"] = cfg.node_count;
  nlohmann::json lattices = nlohmann::json::array();
  for (const auto& [m, n] : cfg.lattices) {
    lattices.push_back({m, n});
  }
  j["lattice_list"] = std::move(lattices);
  nlohmann::json strategies = nlohmann::json::array();
  for (Strategy s : cfg.strategies) {
    strategies.push_back(to_string(s));
  }
  j["strategies"] = std::move(strategies);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["mu"] = cfg.mu;
  j["decorated"] = cfg.decorated;
  j["reheal"] = cfg.reheal;
  if (cfg.failures_max) {
    j["failures_max"] = *cfg.failures_max;
  }
  j["sa_params"] = {{"initial_temperature", cfg.sa_params.initial_temperature},
                    {"cooling_rate", cfg.sa_params.cooling_rate},
                    {"iterations", cfg.sa_params.iterations}};
  j["node_counts"] = cfg.node_counts;
  j["class_sizes"] = cfg.class_sizes;
  j["verify_graphs"] = cfg.verify_graphs;
  j["verify_max_qubits"] = cfg.verify_max_qubits;
  return j;
}

/// Overlays the fields present in j onto cfg. Unknown keys are rejected so a
/// typo cannot silently fall back to a default.
inline void config_overlay_json(ExperimentConfig& cfg,
                                const nlohmann::json& j) {
  static const std::vector<std::string> known{
      "experiment", "node_count", "lattice_list", "strategies", "trials",
      "seed", "mu", "decorated", "reheal", "failures_max",
      "sa_params", "node_counts", "class_sizes", "verify_graphs",
      "verify_max_qubits"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError(it.key(), "unknown configuration field");
    }
  }
  try {
    if (j.contains("experiment")) {
      const auto parsed = experiment_from_string(j["experiment"].get<std::string>());
      if (!parsed) {
        throw ConfigError("experiment", "unknown experiment kind");
      }
      cfg.experiment = *parsed;
    }
    if (j.contains("node_count")) {
      cfg.node_count = j["node_count"].get<NodeId>();
    }
    if (j.contains("lattice_list")) {
      cfg.lattices.clear();
      for (const auto& e : j["lattice_list"]) {
        cfg.lattices.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
    }
    if (j.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& e : j["strategies"]) {
        const auto parsed = strategy_from_string(e.get<std::string>());
        if (!parsed) {
          throw ConfigError("strategies",
                            "unknown strategy '" + e.get<std::string>() + "'");
        }
        cfg.strategies.push_back(*parsed);
      }
    }
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("mu")) cfg.mu = j["mu"].get<int>();
    if (j.contains("decorated")) cfg.decorated = j["decorated"].get<bool>();
    if (j.contains("reheal")) cfg.reheal = j["reheal"].get<bool>();
    if (j.contains("failures_max")) {
      cfg.failures_max = j["failures_max"].get<int>();
    }
    if (j.contains("sa_params")) {
      const auto& sa = j["sa_params"];
      if (sa.contains("initial_temperature")) {
        cfg.sa_params.initial_temperature =
            sa["initial_temperature"].get<double>();
      }
      if (sa.contains("cooling_rate")) {
        cfg.sa_params.cooling_rate = sa["cooling_rate"].get<double>();
      }
      if (sa.contains("iterations")) {
        cfg.sa_params.iterations = sa["iterations"].get<int>();
      }
    }
    if (j.contains("node_counts")) {
      cfg.node_counts = j["node_counts"].get<std::vector<int>>();
    }
    if (j.contains("class_sizes")) {
      cfg.class_sizes = j["class_sizes"].get<std::vector<int>>();
    }
    if (j.contains("verify_graphs")) {
      cfg.verify_graphs = j["verify_graphs"].get<int>();
    }
    if (j.contains("verify_max_qubits")) {
      cfg.verify_max_qubits = j["verify_max_qubits"].get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("<json>", e.what());
  }
}

/// Named configurations mirroring the figure setups; see the README for the
/// exact contents.
inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "fig5") {
    cfg.experiment = ExperimentKind::static_eval;
    cfg.node_count = 20;
    cfg.trials = 100;
    cfg.lattices = {{1, 20}, {2, 10}, {4, 5},  {1, 40}, {2, 20}, {4, 10},
                    {5, 8},  {1, 60}, {2, 30}, {3, 20}, {4, 15}, {5, 12},
                    {6, 10}, {1, 80}, {2, 40}, {4, 20}, {5, 16}, {8, 10},
                    {1, 100}, {2, 50}, {4, 25}, {5, 20}, {10, 10}};
    return cfg;
  }
  if (name == "fig6") {
    cfg.experiment = ExperimentKind::memory_compare;
    cfg.node_counts = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    cfg.class_sizes = {1, 2, 3, 4};
    cfg.decorated = true;
    cfg.mu = 1;
    return cfg;
  }
  if (name == "fig7" || name == "fig8") {
    cfg.experiment = ExperimentKind::resilience;
    cfg.node_count = 8;
    cfg.decorated = true;
    cfg.trials = 50;
    cfg.failures_max = 7;
    cfg.lattices.clear();
    const int max_side = (name == "fig7") ? 15 : 25;
    for (int side = 3; side <= max_side; ++side) {
      cfg.lattices.emplace_back(side, side);
    }
    return cfg;
  }
  if (name == "verify") {
    cfg.experiment = ExperimentKind::graphstate_verify;
    cfg.verify_graphs = 200;
    cfg.verify_max_qubits = 8;
    return cfg;
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

// --- result table -----------------------------------------------------------

/// One CSV row. Raw rows carry per-trial measurements; mean/std rows carry
/// per-cell aggregates recomputable from the raws. wall_ms is the only
/// nondeterministic column and is printed last.
struct ResultRow {
  std::string kind = "raw"; // raw | mean | std
  std::string experiment;
  std::optional<int> node_count;
  std::optional<int> lattice_m;
  std::optional<int> lattice_n;
  std::optional<int> class_size;
  std::string strategy;
  std::optional<long long> trial;
  std::optional<std::uint64_t> seed;
  int failures = -1; // -1: no failure dimension
  std::optional<double> objective;
  std::optional<double> kappa;
  std::optional<double> d;
  std::optional<double> q_total;
  std::optional<double> excluded;
  std::string note;
  std::optional<double> wall_ms;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline const char* csv_header() {
  return "kind,experiment,node_count,lattice_m,lattice_n,class_size,strategy,"
         "trial,seed,failures,objective,kappa,d,q_total,excluded,note,wall_ms";
}

inline void write_csv(const ResultTable& table, std::ostream& out) {
  out << csv_header() << "\n";
  auto cell_i = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  auto cell_d = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const ResultRow& r : table.rows) {
    out << r.kind << ',' << r.experiment << ',' << cell_i(r.node_count) << ','
        << cell_i(r.lattice_m) << ',' << cell_i(r.lattice_n) << ','
        << cell_i(r.class_size) << ',' << r.strategy << ','
        << (r.trial ? std::to_string(*r.trial) : std::string()) << ','
        << (r.seed ? std::to_string(*r.seed) : std::string()) << ','
        << r.failures << ',' << cell_d(r.objective) << ',' << cell_d(r.kappa)
        << ',' << cell_d(r.d) << ',' << cell_d(r.q_total) << ','
        << cell_d(r.excluded) << ',' << r.note << ',' << cell_d(r.wall_ms)
        << "\n";
  }
}

namespace detail {

struct Accumulator {
  std::vector<double> values;
  void add(const std::optional<double>& v) {
    if (v) {
      values.push_back(*v);
    }
  }
  std::optional<double> mean() const {
    if (values.empty()) {
      return std::nullopt;
    }
    double sum = 0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  /// Sample (n-1) standard deviation; 0 by convention for a single value.
  std::optional<double> stddev() const {
    if (values.empty()) {
      return std::nullopt;
    }
    if (values.size() == 1) {
      return 0.0;
    }
    const double m = *mean();
    double acc = 0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
};

} // namespace detail

/// Appends one mean and one std row per (lattice, class size, strategy,
/// failure count) cell, in first-appearance order of the raw rows.
inline void append_aggregates(ResultTable& table) {
  using Key = std::tuple<std::string, std::optional<int>, std::optional<int>,
                         std::optional<int>, std::optional<int>, std::string,
                         int>;
  std::vector<Key> order;
  std::map<Key, std::array<detail::Accumulator, 5>> cells;
  for (const ResultRow& r : table.rows) {
    if (r.kind != "raw") {
      continue;
    }
    Key key{r.experiment, r.node_count, r.lattice_m, r.lattice_n,
            r.class_size, r.strategy, r.failures};
    auto it = cells.find(key);
    if (it == cells.end()) {
      order.push_back(key);
      it = cells.emplace(key, std::array<detail::Accumulator, 5>{}).first;
    }
    it->second[0].add(r.objective);
    it->second[1].add(r.kappa);
    it->second[2].add(r.d);
    it->second[3].add(r.q_total);
    it->second[4].add(r.excluded);
  }
  for (const Key& key : order) {
    const auto& acc = cells.at(key);
    for (const char* kind : {"mean", "std"}) {
      ResultRow row;
      row.kind = kind;
      row.experiment = std::get<0>(key);
      row.node_count = std::get<1>(key);
      row.lattice_m = std::get<2>(key);
      row.lattice_n = std::get<3>(key);
      row.class_size = std::get<4>(key);
      row.strategy = std::get<5>(key);
      row.failures = std::get<6>(key);
      const bool is_mean = std::string(kind) == "mean";
      row.objective = is_mean ? acc[0].mean() : acc[0].stddev();
      row.kappa = is_mean ? acc[1].mean() : acc[1].stddev();
      row.d = is_mean ? acc[2].mean() : acc[2].stddev();
      row.q_total = is_mean ? acc[3].mean() : acc[3].stddev();
      row.excluded = is_mean ? acc[4].mean() : acc[4].stddev();
      table.rows.push_back(std::move(row));
    }
  }
}

/// Runs fn(0..count-1) on up to `workers` threads. Tasks must be independent
/// and write only their own slots, so the merge order never depends on
/// scheduling. The first exception is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) {
    return;
  }
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) {
          return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (std::thread& th : pool) {
    th.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

inline EntanglementTopology build_trial_topology(const ExperimentConfig& cfg,
                                                 int m, int n,
                                                 Strategy strategy,
                                                 std::uint64_t trial_seed) {
  const LabeledGraph g = LabeledGraph::grid_graph(static_cast<std::size_t>(m),
                                                  static_cast<std::size_t>(n));
  AllocationSpec spec;
  spec.strategy = strategy;
  spec.node_count = cfg.node_count;
  spec.seed = trial_seed;
  spec.sa_params = cfg.sa_params;
  Coloring coloring = allocate(g, spec);
  return build_lattice(static_cast<std::size_t>(m),
                       static_cast<std::size_t>(n), cfg.mu, cfg.decorated,
                       std::move(coloring));
}

inline int empty_class_count(const EntanglementTopology& t) {
  return static_cast<int>(t.node_count()) -
         static_cast<int>(t.nonempty_nodes().size());
}

} // namespace detail

/// Static evaluation: per lattice x strategy x trial, allocate and record the
/// min-max objective and kappa-bar.
inline ResultTable run_static_eval(const ExperimentConfig& cfg,
                                   unsigned workers = 1) {
  validate(cfg);
  struct Task {
    int m, n;
    Strategy strategy;
    int trial;
  };
  std::vector<Task> tasks;
  for (const auto& [m, n] : cfg.lattices) {
    for (Strategy s : cfg.strategies) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        tasks.push_back({m, n, s, trial});
      }
    }
  }
  std::vector<ResultRow> rows(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(task.trial);
    const EntanglementTopology topo = detail::build_trial_topology(
        cfg, task.m, task.n, task.strategy, trial_seed);
    ResultRow row;
    row.experiment = to_string(cfg.experiment);
    row.node_count = static_cast<int>(cfg.node_count);
    row.lattice_m = task.m;
    row.lattice_n = task.n;
    row.class_size = (task.m * task.n) / static_cast<int>(cfg.node_count);
    row.strategy = to_string(task.strategy);
    row.trial = task.trial;
    row.seed = trial_seed;
    row.excluded = detail::empty_class_count(topo);
    try {
      row.objective = minmax_objective(topo);
      row.kappa = kappa_bar(topo);
    } catch (const DegenerateTopologyError&) {
      row.note = "degenerate";
    }
    row.wall_ms = detail::elapsed_ms(start);
    rows[i] = std::move(row);
  });
  ResultTable table;
  table.rows = std::move(rows);
  append_aggregates(table);
  return table;
}

/// Memory comparison: all-to-all Bell baseline vs lattice topologies at the
/// configured class sizes, over a node-count sweep. The kappa column for the
/// lattice rows is measured on an optimized allocation of a 1 x kC snake for
/// k <= 2 and a k x C lattice for k >= 3.
inline ResultTable run_memory_compare(const ExperimentConfig& cfg) {
  validate(cfg);
  ResultTable table;
  for (int c : cfg.node_counts) {
    {
      const auto start = std::chrono::steady_clock::now();
      ResultRow row;
      row.experiment = to_string(cfg.experiment);
      row.node_count = c;
      row.strategy = "all-to-all";
      row.q_total = static_cast<double>(all_to_all_memory(c).total);
      row.kappa = 1.0; // one dedicated Bell pair per node pair
      row.wall_ms = detail::elapsed_ms(start);
      table.rows.push_back(std::move(row));
    }
    for (int k : cfg.class_sizes) {
      const auto start = std::chrono::steady_clock::now();
      const int m = (k <= 2) ? 1 : k;
      const int n = (k <= 2) ? k * c : c;
      const LabeledGraph g = LabeledGraph::grid_graph(
          static_cast<std::size_t>(m), static_cast<std::size_t>(n));
      Coloring coloring = allocate_optimized(g, static_cast<NodeId>(c),
                                             cfg.seed, cfg.sa_params);
      const EntanglementTopology topo = build_lattice(
          static_cast<std::size_t>(m), static_cast<std::size_t>(n), cfg.mu,
          cfg.decorated, std::move(coloring));
      ResultRow row;
      row.experiment = to_string(cfg.experiment);
      row.node_count = c;
      row.lattice_m = m;
      row.lattice_n = n;
      row.class_size = k;
      row.strategy = "optimized";
      row.seed = cfg.seed;
      row.q_total = static_cast<double>(memory_report(topo).total);
      row.kappa = kappa_bar(topo);
      row.wall_ms = detail::elapsed_ms(start);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

/// Resilience: per lattice x strategy x trial, one nested failure sequence of
/// failures_max steps; each step contributes a row with the per-component
/// metrics after that many failures.
inline ResultTable run_resilience(const ExperimentConfig& cfg,
                                  unsigned workers = 1) {
  validate(cfg);
  const int k_failures = *cfg.failures_max;
  struct Task {
    int m, n;
    Strategy strategy;
    int trial;
  };
  std::vector<Task> tasks;
  for (const auto& [m, n] : cfg.lattices) {
    for (Strategy s : cfg.strategies) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        tasks.push_back({m, n, s, trial});
      }
    }
  }
  std::vector<std::vector<ResultRow>> per_task(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t trial_seed = cfg.seed + static_cast<std::uint64_t>(task.trial);
    const EntanglementTopology topo = detail::build_trial_topology(
        cfg, task.m, task.n, task.strategy, trial_seed);
    const FailureTrace trace =
        run_failure_sequence(topo, k_failures, trial_seed, cfg.reheal);
    const double wall = detail::elapsed_ms(start);
    std::vector<ResultRow> rows;
    rows.reserve(trace.steps.size());
    for (std::size_t step = 0; step < trace.steps.size(); ++step) {
      ResultRow row;
      row.experiment = to_string(cfg.experiment);
      row.node_count = static_cast<int>(cfg.node_count);
      row.lattice_m = task.m;
      row.lattice_n = task.n;
      row.class_size =
          (task.m * task.n) / static_cast<int>(cfg.node_count);
      row.strategy = to_string(task.strategy);
      row.trial = task.trial;
      row.seed = trial_seed;
      row.failures = (k_failures == 0) ? 0 : static_cast<int>(step) + 1;
      row.kappa = trace.steps[step].kappa_hat;
      row.d = trace.steps[step].d_hat;
      row.excluded = trace.steps[step].excluded_components;
      row.wall_ms = wall;
      rows.push_back(std::move(row));
    }
    per_task[i] = std::move(rows);
  });
  ResultTable table;
  for (auto& rows : per_task) {
    for (auto& row : rows) {
      table.rows.push_back(std::move(row));
    }
  }
  append_aggregates(table);
  return table;
}

struct OptimizeResult {
  ResultTable table;
  /// Rebuilt topology of the first row achieving the lowest objective.
  std::optional<EntanglementTopology> best;
};

/// Allocation-only runs: per lattice x strategy x trial, report the objective
/// and kappa-bar, and keep the best optimized topology for export.
inline OptimizeResult run_optimize(const ExperimentConfig& cfg,
                                   unsigned workers = 1) {
  validate(cfg);
  ResultTable table = [&] {
    ExperimentConfig inner = cfg;
    inner.experiment = ExperimentKind::static_eval;
    ResultTable t = run_static_eval(inner, workers);
    for (ResultRow& row : t.rows) {
      row.experiment = to_string(ExperimentKind::optimize);
    }
    return t;
  }();

  OptimizeResult out;
  std::optional<double> best_obj;
  std::optional<std::uint64_t> best_seed;
  std::optional<Strategy> best_strategy;
  int best_m = 0;
  int best_n = 0;
  for (const ResultRow& row : table.rows) {
    if (row.kind != "raw" || !row.objective) {
      continue;
    }
    if (!best_obj || *row.objective < *best_obj) {
      best_obj = row.objective;
      best_seed = row.seed;
      best_strategy = strategy_from_string(row.strategy);
      best_m = *row.lattice_m;
      best_n = *row.lattice_n;
    }
  }
  if (best_obj && best_strategy) {
    out.best = detail::build_trial_topology(cfg, best_m, best_n,
                                            *best_strategy, *best_seed);
  }
  out.table = std::move(table);
  return out;
}

/// Test hook: mutates a measurement result graph before the oracle sees it.
using VerifyCorruptionHook = std::function<void(LabeledGraph&)>;

/// Samples random graphs and checks every X/Y/Z measurement on a random
/// qubit against the dense statevector oracle. Emits one row per (graph,
/// basis); failures carry the offending (graph, qubit, basis) triple in the
/// note column.
inline ResultTable run_graphstate_verify(
    const ExperimentConfig& cfg, const VerifyCorruptionHook& corrupt = {}) {
  validate(cfg);
  Rng rng(cfg.seed);
  ResultTable table;
  long long passes = 0;
  long long failures = 0;
  for (int idx = 0; idx < cfg.verify_graphs; ++idx) {
    const std::size_t n =
        2 + static_cast<std::size_t>(
                rng.below(static_cast<std::uint64_t>(cfg.verify_max_qubits - 1)));
    LabeledGraph g(n);
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId w = u + 1; w < n; ++w) {
        if (rng.unit() < 0.5) {
          g.add_edge(u, w);
        }
      }
    }
    const GraphState state(g);
    for (PauliBasis basis : {PauliBasis::X, PauliBasis::Y, PauliBasis::Z}) {
      const auto start = std::chrono::steady_clock::now();
      const VertexId qubit = static_cast<VertexId>(rng.below(n));
      MeasurementOutcomeGraph outcome = state.measure_pauli(qubit, basis);
      if (corrupt) {
        corrupt(outcome.result_graph);
      }
      const bool ok = statevector_oracle_check(
          state, qubit, basis, outcome.special_neighbor, outcome.result_graph);
      ResultRow row;
      row.experiment = to_string(cfg.experiment);
      row.trial = idx;
      row.seed = cfg.seed;
      row.objective = ok ? 1.0 : 0.0;
      row.strategy = to_string(basis);
      if (!ok) {
        std::ostringstream note;
        note << "FAIL basis=" << to_string(basis) << " qubit=" << qubit
             << " edges=";
        bool first = true;
        for (VertexId u = 0; u < g.id_bound(); ++u) {
          for (VertexId w : g.neighbors(u)) {
            if (u < w) {
              note << (first ? "" : "|") << u << "-" << w;
              first = false;
            }
          }
        }
        row.note = note.str();
        ++failures;
      } else {
        ++passes;
      }
      row.wall_ms = detail::elapsed_ms(start);
      table.rows.push_back(std::move(row));
    }
  }
  ResultRow summary;
  summary.kind = "mean";
  summary.experiment = to_string(cfg.experiment);
  summary.objective =
      static_cast<double>(passes) / static_cast<double>(passes + failures);
  summary.note = std::to_string(passes) + " passed, " +
                 std::to_string(failures) + " failed";
  table.rows.push_back(std::move(summary));
  return table;
}

/// Dispatch on the config's experiment kind (optimize goes through
/// run_optimize and drops the exported topology).
inline ResultTable run_experiment(const ExperimentConfig& cfg,
                                  unsigned workers = 1) {
  switch (cfg.experiment) {
    case ExperimentKind::static_eval:
      return run_static_eval(cfg, workers);
    case ExperimentKind::memory_compare:
      return run_memory_compare(cfg);
    case ExperimentKind::resilience:
      return run_resilience(cfg, workers);
    case ExperimentKind::optimize:
      return run_optimize(cfg, workers).table;
    case ExperimentKind::graphstate_verify:
      return run_graphstate_verify(cfg);
  }
  throw std::invalid_argument("unknown experiment kind");
}

/// Sidecar written next to every CSV: the fully resolved config plus the
/// library version, enough to replay the run.
inline nlohmann::json meta_sidecar(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  j["version"] = kVersion;
  j["generator"] = "enttopo";
  return j;
}

} // namespace enttopo
