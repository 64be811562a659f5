// boomerang: simulation and analysis CLI for the affine boomerang
// opinion-dynamics model on signed graphs.
//
// Exit codes: 0 success; 1 model-level failure (e.g. the graph lacks the
// required sign arrangement); 2 bad input, bad flags, or I/O failure.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "boomerang/analysis.hpp"
#include "boomerang/dynamics.hpp"
#include "boomerang/errors.hpp"
#include "boomerang/experiments.hpp"
#include "boomerang/graph.hpp"
#include "boomerang/io.hpp"
#include "boomerang/rng.hpp"

namespace {

using namespace boomerang;

// Seed precedence: BOOMERANG_SEED environment variable, then --seed, then the
// config file. Commands that need randomness fail when none is set; there is
// no time-based fallback.
std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("BOOMERANG_SEED");
  if (!s) return std::nullopt;
  std::uint64_t v = 0;
  std::string tok(s);
  std::size_t used = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    fail(Errc::validation_error, "BOOMERANG_SEED: not an unsigned integer");
  }
  if (used != tok.size() || tok.empty() || tok[0] == '-') {
    fail(Errc::validation_error, "BOOMERANG_SEED: not an unsigned integer");
  }
  return v;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           const std::optional<std::uint64_t>& config) {
  if (const auto env = env_seed()) return *env;
  if (flag) return *flag;
  if (config) return *config;
  fail(Errc::validation_error,
       "a seed is required (set BOOMERANG_SEED, pass --seed, or put one in the config)");
}

const char* balance_text(const ArrangementReport& rep) {
  switch (rep.balance_class) {
    case BalanceClass::structural_m1:
    case BalanceClass::structural_m2: return "structural balance";
    case BalanceClass::clustering: return "clustering balance";
    case BalanceClass::none: return rep.satisfies_arrangement ? "balanced (incomplete graph)"
                                                              : "no balance";
  }
  return "no balance";
}

// ---------------------------------------------------------------------------

struct CheckBalanceOpts {
  std::string graph;
};

int cmd_check_balance(const CheckBalanceOpts& o) {
  const SignedGraph g = read_graph_file(o.graph);
  const ArrangementReport rep = classify_arrangement(g);

  std::cout << "vertices: " << g.vertex_count() << ", edges: " << g.edge_count() << " ("
            << g.positive_count() << " positive, " << g.negative_count() << " negative)\n";
  std::cout << "connected: " << (rep.connected ? "yes" : "no") << "\n";
  std::cout << "arrangement: " << (rep.satisfies_arrangement ? "satisfied" : "violated") << "\n";
  for (const Edge& e : rep.violating_edges) {
    std::cout << "violating edge: " << e.u << " " << e.v << " (negative inside a faction)\n";
  }
  std::cout << "k=" << rep.k << " " << balance_text(rep) << "\n";
  return rep.satisfies_arrangement ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string config;
  std::string graph;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<double> tol;
  std::optional<double> epsilon;
  std::optional<double> a;
  std::optional<double> o_min;
  std::optional<double> o_max;
  std::optional<std::int64_t> stride;
  std::string x0_file;
  std::string out;
  std::string report;
};

ExperimentConfig config_from(const std::string& config_path, const std::string& graph_path) {
  if (!config_path.empty()) return read_config_file(config_path);
  if (graph_path.empty()) {
    fail(Errc::validation_error, "need --config or --graph");
  }
  ExperimentConfig cfg;
  cfg.graph_file = graph_path;
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const SimulateOpts& o) {
  if (!o.graph.empty() && o.config.empty()) cfg.graph_file = o.graph;
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.tol) cfg.tol = *o.tol;
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  if (o.a) cfg.self_weight = *o.a;
  if (o.o_min) cfg.o_min = *o.o_min;
  if (o.o_max) cfg.o_max = *o.o_max;
  if (o.stride) cfg.record_stride = *o.stride;
}

int cmd_simulate(const SimulateOpts& o) {
  ExperimentConfig cfg = config_from(o.config, o.graph);
  apply_overrides(cfg, o);
  cfg.seed = resolve_seed(o.seed, cfg.seed);
  validate_experiment_config(cfg);

  const MaterializedExperiment mat = materialize(cfg);
  Rng rng(derive_seed(*cfg.seed, 0));  // a single run is trial 0 of its seed
  std::vector<double> x0;
  if (!o.x0_file.empty()) {
    x0 = read_opinions_file(o.x0_file);
  } else {
    x0 = initial_state(cfg, mat.partition, mat.params, rng);
  }

  Trajectory traj = run_trajectory(mat.graph, mat.dist, mat.params, x0, cfg.horizon, rng,
                                   cfg.record_stride);
  traj.seed = *cfg.seed;

  if (!o.out.empty()) write_trajectory_csv(traj, o.out);
  if (!o.report.empty()) {
    const AnalysisReport rep = analyze_trajectory(traj, mat.partition, cfg.tol, cfg.epsilon);
    write_text_file(o.report, serialize_report_json(rep));
  }
  std::cout << "steps: " << cfg.horizon << ", final spread: " << spread(traj.final_state())
            << "\n";
  if (!o.out.empty()) std::cout << "trajectory: " << o.out << "\n";
  if (!o.report.empty()) std::cout << "report: " << o.report << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct MonteCarloOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<int> trials;
  std::optional<double> tol;
  std::optional<double> epsilon;
  std::string out;
  std::string csv;
  unsigned workers = 0;
};

int cmd_montecarlo(const MonteCarloOpts& o) {
  if (o.config.empty()) fail(Errc::validation_error, "montecarlo needs --config");
  ExperimentConfig cfg = read_config_file(o.config);
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.trials) cfg.trials = *o.trials;
  if (o.tol) cfg.tol = *o.tol;
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  cfg.seed = resolve_seed(o.seed, cfg.seed);

  const ExperimentSummary summary = run_monte_carlo(cfg, o.workers);

  if (!o.out.empty()) write_text_file(o.out, serialize_summary_json(summary));
  if (!o.csv.empty()) write_text_file(o.csv, serialize_summary_csv(summary));

  std::cout << "mode: " << detector_mode_name(summary.mode) << ", trials: "
            << summary.aggregate.trials << "\n";
  const SummaryAggregate& a = summary.aggregate;
  if (a.fraction_converged) std::cout << "fraction converged: " << *a.fraction_converged << "\n";
  if (a.fraction_polarized) std::cout << "fraction polarized: " << *a.fraction_polarized << "\n";
  if (a.two_polarized_fraction) {
    std::cout << "two-polarized fraction: " << *a.two_polarized_fraction << "\n";
  }
  if (a.min_visits_low && a.min_visits_high && a.min_crossings) {
    std::cout << "min band visits: low " << *a.min_visits_low << ", high " << *a.min_visits_high
              << ", crossings " << *a.min_crossings << "\n";
  }
  if (a.mean_extreme_occupancy) {
    std::cout << "mean extreme occupancy: " << *a.mean_extreme_occupancy << "\n";
  }
  if (!o.out.empty()) std::cout << "summary: " << o.out << "\n";
  if (!o.csv.empty()) std::cout << "trials csv: " << o.csv << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ReplayOpts {
  std::string graph;
  std::string traj;
  std::string edges;
  std::string x0_file;
  double a = 0.5;
  double o_min = 0.0;
  double o_max = 1.0;
  std::optional<std::int64_t> stride;
  std::string out;
};

int cmd_replay(const ReplayOpts& o) {
  if (o.graph.empty()) fail(Errc::validation_error, "replay needs --graph");
  const SignedGraph g = read_graph_file(o.graph);
  const ModelParams params = ModelParams::uniform(o.o_min, o.o_max, o.a, g.vertex_count());

  std::vector<double> x0;
  std::vector<Edge> sequence;
  std::optional<TrajectoryData> reference;
  if (!o.traj.empty()) {
    TrajectoryData data = read_trajectory_csv(o.traj);
    if (data.n != g.vertex_count()) {
      fail(Errc::validation_error, "trajectory has " + std::to_string(data.n) +
                                       " agents but the graph has " +
                                       std::to_string(g.vertex_count()));
    }
    for (std::size_t r = 0; r < data.times.size(); ++r) {
      if (data.times[r] != static_cast<std::int64_t>(r)) {
        fail(Errc::validation_error, "replay needs a stride-1 trajectory (every step recorded)");
      }
    }
    x0.assign(data.states.begin(), data.states.begin() + data.n);
    sequence.assign(data.row_edges.begin() + 1, data.row_edges.end());
    reference = std::move(data);
  } else {
    if (o.edges.empty() || o.x0_file.empty()) {
      fail(Errc::validation_error, "replay needs --traj, or --edges together with --x0");
    }
    sequence = read_edge_sequence_file(o.edges);
    x0 = read_opinions_file(o.x0_file);
  }

  const std::int64_t stride = o.stride.value_or(1);
  const Trajectory traj = replay_sequence(g, params, x0, sequence, stride);

  if (reference) {
    // the engine must reproduce the input file bit-for-bit
    if (stride != 1 || traj.states != reference->states) {
      fail(Errc::validation_error,
           "replayed states do not match the input trajectory (wrong graph or weights?)");
    }
    std::cout << "verified: replay matches the input trajectory\n";
  }
  if (!o.out.empty()) {
    write_trajectory_csv(traj, o.out);
    std::cout << "trajectory: " << o.out << "\n";
  }
  std::cout << "steps: " << sequence.size() << ", final spread: " << spread(traj.final_state())
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PerturbOpts {
  std::string graph;
  int flip = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string edges_out;
};

int cmd_perturb(const PerturbOpts& o) {
  if (o.graph.empty()) fail(Errc::validation_error, "perturb needs --graph");
  const SignedGraph g = read_graph_file(o.graph);
  const std::uint64_t seed = resolve_seed(o.seed, std::nullopt);

  // same stream as the perturbed experiment preset, so `perturb --flip 3` on
  // the two-faction graph reproduces that preset's graph for the same seed
  Rng rng(derive_seed(seed, kGraphStream));
  const auto [perturbed, flipped] = perturb_flip_edges(g, o.flip, rng);

  if (!o.out.empty()) write_graph_file(perturbed, o.out);
  for (const Edge& e : flipped) {
    const int sign = *perturbed.sign_of(e.u, e.v);
    std::cout << "flipped: " << e.u << " " << e.v << " -> " << (sign > 0 ? "+1" : "-1") << "\n";
  }
  if (!o.edges_out.empty()) write_edge_sequence_file(flipped, o.edges_out);
  if (!o.out.empty()) std::cout << "graph: " << o.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ProximityOpts {
  std::string graph;
  std::vector<int> pair;
  double epsilon = 0.1;
  double a = 0.5;
  double o_min = 0.0;
  double o_max = 1.0;
  std::string out;
};

int cmd_proximity(const ProximityOpts& o) {
  if (o.graph.empty()) fail(Errc::validation_error, "proximity needs --graph");
  const SignedGraph g = read_graph_file(o.graph);
  const FactionPartition partition = positive_components(g);
  const ModelParams params = ModelParams::uniform(o.o_min, o.o_max, o.a, g.vertex_count());

  const int i = o.pair[0];
  const int j = o.pair[1];
  const std::vector<Edge> seq = build_proximity_sequence(g, partition, params, i, j, o.epsilon);

  const bool same = partition.block_of(i) == partition.block_of(j);
  std::cout << "pair: " << i << " " << j << " ("
            << (same ? "same faction: closeness target |x_i - x_j| < "
                     : "different factions: separation target |x_i - x_j| > range - ")
            << o.epsilon << ")\n";
  std::cout << "sequence length: " << seq.size() << "\n";
  if (!o.out.empty()) {
    write_edge_sequence_file(seq, o.out);
    std::cout << "sequence: " << o.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine boomerang opinion dynamics on signed graphs"};
  app.require_subcommand(1);

  CheckBalanceOpts cb;
  CLI::App* cb_cmd = app.add_subcommand(
      "check-balance", "classify a signed graph (arrangement, factions, balance)");
  cb_cmd->add_option("--graph", cb.graph, "graph file")->required();

  SimulateOpts sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one seeded trajectory");
  sim_cmd->add_option("--config", sim.config, "experiment config JSON");
  sim_cmd->add_option("--graph", sim.graph, "graph file (alternative to --config)");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--horizon", sim.horizon, "number of update steps");
  sim_cmd->add_option("--tol", sim.tol, "detector tolerance");
  sim_cmd->add_option("--epsilon", sim.epsilon, "fluctuation band width");
  sim_cmd->add_option("--a", sim.a, "uniform self-weight");
  sim_cmd->add_option("--o-min", sim.o_min, "lower opinion bound");
  sim_cmd->add_option("--o-max", sim.o_max, "upper opinion bound");
  sim_cmd->add_option("--stride", sim.stride, "record every k-th state");
  sim_cmd->add_option("--x0", sim.x0_file, "initial opinions file (default: sampled)");
  sim_cmd->add_option("--out", sim.out, "trajectory CSV output");
  sim_cmd->add_option("--report", sim.report, "analysis report JSON output");

  MonteCarloOpts mc;
  CLI::App* mc_cmd = app.add_subcommand("montecarlo", "run many seeded trials and aggregate");
  mc_cmd->add_option("--config", mc.config, "experiment config JSON")->required();
  mc_cmd->add_option("--seed", mc.seed, "master seed");
  mc_cmd->add_option("--horizon", mc.horizon, "number of update steps");
  mc_cmd->add_option("--trials", mc.trials, "number of trials");
  mc_cmd->add_option("--tol", mc.tol, "detector tolerance");
  mc_cmd->add_option("--epsilon", mc.epsilon, "fluctuation band width");
  mc_cmd->add_option("--out", mc.out, "summary JSON output");
  mc_cmd->add_option("--csv", mc.csv, "per-trial CSV output");
  mc_cmd->add_option("--workers", mc.workers, "worker threads (0 = auto)");

  ReplayOpts rp;
  CLI::App* rp_cmd = app.add_subcommand("replay", "deterministically replay an edge sequence");
  rp_cmd->add_option("--graph", rp.graph, "graph file")->required();
  rp_cmd->add_option("--traj", rp.traj, "trajectory CSV to replay and verify");
  rp_cmd->add_option("--edges", rp.edges, "edge sequence file");
  rp_cmd->add_option("--x0", rp.x0_file, "initial opinions file");
  rp_cmd->add_option("--a", rp.a, "uniform self-weight");
  rp_cmd->add_option("--o-min", rp.o_min, "lower opinion bound");
  rp_cmd->add_option("--o-max", rp.o_max, "upper opinion bound");
  rp_cmd->add_option("--stride", rp.stride, "record every k-th state");
  rp_cmd->add_option("--out", rp.out, "trajectory CSV output");

  PerturbOpts pt;
  CLI::App* pt_cmd = app.add_subcommand("perturb", "flip random edge signs (seeded)");
  pt_cmd->add_option("--graph", pt.graph, "graph file")->required();
  pt_cmd->add_option("--flip", pt.flip, "number of edges to flip")->required();
  pt_cmd->add_option("--seed", pt.seed, "master seed");
  pt_cmd->add_option("--out", pt.out, "perturbed graph output");
  pt_cmd->add_option("--edges-out", pt.edges_out, "flipped edge list output");

  ProximityOpts px;
  CLI::App* px_cmd = app.add_subcommand(
      "proximity", "build a closeness/separation edge sequence for a vertex pair");
  px_cmd->add_option("--graph", px.graph, "graph file")->required();
  px_cmd->add_option("--pair", px.pair, "vertex pair i j")->expected(2)->required();
  px_cmd->add_option("--epsilon", px.epsilon, "target tolerance");
  px_cmd->add_option("--a", px.a, "uniform self-weight");
  px_cmd->add_option("--o-min", px.o_min, "lower opinion bound");
  px_cmd->add_option("--o-max", px.o_max, "upper opinion bound");
  px_cmd->add_option("--out", px.out, "edge sequence output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cb_cmd->parsed()) return cmd_check_balance(cb);
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (mc_cmd->parsed()) return cmd_montecarlo(mc);
    if (rp_cmd->parsed()) return cmd_replay(rp);
    if (pt_cmd->parsed()) return cmd_perturb(pt);
    if (px_cmd->parsed()) return cmd_proximity(px);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::model ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
