// Command-line front end for the experiment runners. Config resolution order:
// subcommand defaults < --preset < --config file < explicit flags.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "enttopo/enttopo.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset_name;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  unsigned workers = 0; // 0: all available cores
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON config file (overlaid on preset/defaults)");
  cmd->add_option("--preset", flags.preset_name,
                  "named preset: fig5, fig6, fig7, fig8, verify");
  cmd->add_option("--seed", flags.seed, "base seed; trial i uses seed+i");
  cmd->add_option("--trials", flags.trials, "independent trials per cell");
  cmd->add_option("--out", flags.out_path,
                  "CSV output path; also writes <out>.meta.json");
  cmd->add_option("--workers", flags.workers,
                  "worker threads (default: available parallelism)");
}

enttopo::ExperimentConfig resolve_config(enttopo::ExperimentKind kind,
                                         const CommonFlags& flags) {
  enttopo::ExperimentConfig cfg;
  cfg.experiment = kind;
  if (!flags.preset_name.empty()) {
    cfg = enttopo::preset(flags.preset_name);
    if (cfg.experiment != kind) {
      throw enttopo::ConfigError("preset", "preset '" + flags.preset_name +
                                               "' belongs to experiment '" +
                                               enttopo::to_string(cfg.experiment) +
                                               "'");
    }
  }
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      throw enttopo::ConfigError("config", "cannot open '" + flags.config_path + "'");
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw enttopo::ConfigError("config", e.what());
    }
    enttopo::config_overlay_json(cfg, j);
    if (cfg.experiment != kind) {
      throw enttopo::ConfigError("experiment",
                                 "config file requests a different experiment");
    }
  }
  if (flags.seed) {
    cfg.seed = *flags.seed;
  }
  if (flags.trials) {
    cfg.trials = *flags.trials;
  }
  return cfg;
}

void emit(const enttopo::ResultTable& table,
          const enttopo::ExperimentConfig& cfg, const CommonFlags& flags) {
  if (flags.out_path.empty()) {
    enttopo::write_csv(table, std::cout);
    return;
  }
  std::ofstream out(flags.out_path);
  if (!out) {
    throw std::runtime_error("cannot write '" + flags.out_path + "'");
  }
  enttopo::write_csv(table, out);
  std::ofstream meta(flags.out_path + ".meta.json");
  if (!meta) {
    throw std::runtime_error("cannot write meta sidecar");
  }
  meta << enttopo::meta_sidecar(cfg).dump(2) << "\n";
  std::cerr << "wrote " << flags.out_path << " and " << flags.out_path
            << ".meta.json\n";
}

std::optional<std::pair<int, int>> parse_lattice(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    return std::nullopt;
  }
  try {
    const int m = std::stoi(text.substr(0, x));
    const int n = std::stoi(text.substr(x + 1));
    return std::pair<int, int>{m, n};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"enttopo: lattice entanglement-topology allocation and "
               "resilience experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> lattice_args;
  std::optional<int> nodes_arg;
  std::optional<int> mu_arg;
  std::optional<bool> decorated_arg;
  std::vector<std::string> strategy_args;
  std::optional<int> failures_arg;
  bool no_reheal = false;
  std::string trace_out;
  std::string graph_in;
  std::string graph_out;
  std::string topology_out;
  std::optional<int> verify_graphs_arg;
  std::optional<int> verify_max_qubits_arg;

  auto add_topology_flags = [&](CLI::App* cmd) {
    cmd->add_option("--lattice", lattice_args,
                    "lattice dimensions as MxN (repeatable)");
    cmd->add_option("--nodes", nodes_arg, "number of network nodes");
    cmd->add_option("--mu", mu_arg, "parallelism factor");
    cmd->add_flag("--decorated,!--undecorated", decorated_arg,
                  "toggle qubit decorations");
    cmd->add_option("--strategies", strategy_args,
                    "allocation strategies (optimized, random, clustered)");
  };

  CLI::App* static_cmd =
      app.add_subcommand("static-eval", "objective and kappa-bar per lattice, "
                                        "strategy and trial");
  add_common_flags(static_cmd, flags);
  add_topology_flags(static_cmd);

  CLI::App* memory_cmd = app.add_subcommand(
      "memory-compare", "qubit totals: all-to-all Bell baseline vs lattices");
  add_common_flags(memory_cmd, flags);

  CLI::App* resilience_cmd = app.add_subcommand(
      "resilience", "nested node failures with per-component metrics");
  add_common_flags(resilience_cmd, flags);
  add_topology_flags(resilience_cmd);
  resilience_cmd->add_option("--failures", failures_arg,
                             "number of nested failures");
  resilience_cmd->add_flag("--no-reheal", no_reheal,
                           "skip re-healing between failures");
  resilience_cmd->add_option(
      "--trace-out", trace_out,
      "write per-trial failure traces (first lattice/strategy) as JSON");

  CLI::App* optimize_cmd = app.add_subcommand(
      "optimize", "run the allocation and export the resulting topology");
  add_common_flags(optimize_cmd, flags);
  add_topology_flags(optimize_cmd);
  optimize_cmd->add_option("--graph", graph_in,
                           "edge-list file to allocate instead of a lattice");
  optimize_cmd->add_option("--graph-out", graph_out,
                           "write the connectivity graph as an edge list");
  optimize_cmd->add_option("--topology-out", topology_out,
                           "write the best topology as JSON");

  CLI::App* verify_cmd = app.add_subcommand(
      "graphstate-verify",
      "check measurement rewrites against the statevector oracle");
  add_common_flags(verify_cmd, flags);
  verify_cmd->add_option("--graphs", verify_graphs_arg,
                         "number of random graphs");
  verify_cmd->add_option("--max-qubits", verify_max_qubits_arg,
                         "largest random graph size");

  CLI11_PARSE(app, argc, argv);

  try {
    enttopo::ExperimentKind kind = enttopo::ExperimentKind::static_eval;
    if (memory_cmd->parsed()) kind = enttopo::ExperimentKind::memory_compare;
    if (resilience_cmd->parsed()) kind = enttopo::ExperimentKind::resilience;
    if (optimize_cmd->parsed()) kind = enttopo::ExperimentKind::optimize;
    if (verify_cmd->parsed()) kind = enttopo::ExperimentKind::graphstate_verify;

    enttopo::ExperimentConfig cfg = resolve_config(kind, flags);

    if (!lattice_args.empty()) {
      cfg.lattices.clear();
      for (const std::string& text : lattice_args) {
        const auto dims = parse_lattice(text);
        if (!dims) {
          throw enttopo::ConfigError("lattice", "expected MxN, got '" + text + "'");
        }
        cfg.lattices.push_back(*dims);
      }
    }
    if (nodes_arg) cfg.node_count = static_cast<enttopo::NodeId>(*nodes_arg);
    if (mu_arg) cfg.mu = *mu_arg;
    if (decorated_arg) cfg.decorated = *decorated_arg;
    if (!strategy_args.empty()) {
      cfg.strategies.clear();
      for (const std::string& name : strategy_args) {
        const auto s = enttopo::strategy_from_string(name);
        if (!s) {
          throw enttopo::ConfigError("strategies", "unknown strategy '" + name + "'");
        }
        cfg.strategies.push_back(*s);
      }
    }
    if (failures_arg) cfg.failures_max = *failures_arg;
    if (no_reheal) cfg.reheal = false;
    if (verify_graphs_arg) cfg.verify_graphs = *verify_graphs_arg;
    if (verify_max_qubits_arg) cfg.verify_max_qubits = *verify_max_qubits_arg;

    switch (kind) {
      case enttopo::ExperimentKind::static_eval:
        emit(enttopo::run_static_eval(cfg, flags.workers), cfg, flags);
        break;
      case enttopo::ExperimentKind::memory_compare:
        emit(enttopo::run_memory_compare(cfg), cfg, flags);
        break;
      case enttopo::ExperimentKind::resilience: {
        emit(enttopo::run_resilience(cfg, flags.workers), cfg, flags);
        if (!trace_out.empty()) {
          // replay the first cell's trials; seeds make this exact
          const auto& [m, n] = cfg.lattices.front();
          const enttopo::LabeledGraph g = enttopo::LabeledGraph::grid_graph(
              static_cast<std::size_t>(m), static_cast<std::size_t>(n));
          nlohmann::json traces = nlohmann::json::array();
          for (int trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t trial_seed =
                cfg.seed + static_cast<std::uint64_t>(trial);
            enttopo::AllocationSpec spec;
            spec.strategy = cfg.strategies.front();
            spec.node_count = cfg.node_count;
            spec.seed = trial_seed;
            spec.sa_params = cfg.sa_params;
            const enttopo::EntanglementTopology topo = enttopo::build_lattice(
                static_cast<std::size_t>(m), static_cast<std::size_t>(n),
                cfg.mu, cfg.decorated, enttopo::allocate(g, spec));
            const enttopo::FailureTrace trace = enttopo::run_failure_sequence(
                topo, *cfg.failures_max, trial_seed, cfg.reheal);
            nlohmann::json entry = enttopo::trace_to_json(trace);
            entry["trial"] = trial;
            entry["seed"] = trial_seed;
            entry["lattice"] = {m, n};
            entry["strategy"] = enttopo::to_string(cfg.strategies.front());
            traces.push_back(std::move(entry));
          }
          std::ofstream out(trace_out);
          if (!out) {
            throw std::runtime_error("cannot write '" + trace_out + "'");
          }
          out << traces.dump(2) << "\n";
        }
        break;
      }
      case enttopo::ExperimentKind::optimize: {
        if (!graph_in.empty()) {
          // arbitrary imported graph: single allocation per strategy/trial
          std::ifstream in(graph_in);
          if (!in) {
            throw enttopo::ConfigError("graph", "cannot open '" + graph_in + "'");
          }
          const enttopo::LabeledGraph g = enttopo::graph_from_edge_list(in);
          enttopo::AllocationSpec spec;
          spec.strategy = cfg.strategies.front();
          spec.node_count = cfg.node_count;
          spec.seed = cfg.seed;
          spec.sa_params = cfg.sa_params;
          enttopo::Coloring coloring = enttopo::allocate(g, spec);
          const enttopo::EntanglementTopology topo(g, std::move(coloring),
                                                   cfg.mu, cfg.decorated);
          enttopo::ResultTable table;
          enttopo::ResultRow row;
          row.experiment = "optimize";
          row.node_count = static_cast<int>(cfg.node_count);
          row.strategy = enttopo::to_string(spec.strategy);
          row.seed = cfg.seed;
          row.objective = enttopo::minmax_objective(topo);
          row.kappa = enttopo::kappa_bar(topo);
          table.rows.push_back(std::move(row));
          emit(table, cfg, flags);
          if (!topology_out.empty()) {
            std::ofstream out(topology_out);
            out << enttopo::topology_to_json(topo).dump(2) << "\n";
          }
          if (!graph_out.empty()) {
            std::ofstream out(graph_out);
            out << enttopo::to_edge_list(topo.connectivity());
          }
          break;
        }
        enttopo::OptimizeResult result =
            enttopo::run_optimize(cfg, flags.workers);
        emit(result.table, cfg, flags);
        if (result.best) {
          if (!topology_out.empty()) {
            std::ofstream out(topology_out);
            out << enttopo::topology_to_json(*result.best).dump(2) << "\n";
          }
          if (!graph_out.empty()) {
            std::ofstream out(graph_out);
            out << enttopo::to_edge_list(result.best->connectivity());
          }
        }
        break;
      }
      case enttopo::ExperimentKind::graphstate_verify: {
        const enttopo::ResultTable table = enttopo::run_graphstate_verify(cfg);
        emit(table, cfg, flags);
        for (const enttopo::ResultRow& row : table.rows) {
          if (row.kind == "mean" && row.objective && *row.objective < 1.0) {
            std::cerr << "verification failures: " << row.note << "\n";
            return 3;
          }
        }
        break;
      }
    }
  } catch (const enttopo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
