#include "boomerang/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "boomerang/errors.hpp"
#include "boomerang/io.hpp"

namespace boomerang {

void validate_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) fail(Errc::validation_error, "trials must be >= 1");
  if (cfg.horizon < 1) fail(Errc::validation_error, "horizon must be >= 1");
  if (cfg.record_stride < 1) fail(Errc::validation_error, "record_stride must be >= 1");
  if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) {
    fail(Errc::validation_error, "tol must be a positive finite number");
  }
  if (!std::isfinite(cfg.o_min) || !std::isfinite(cfg.o_max) || !(cfg.o_min < cfg.o_max)) {
    fail(Errc::validation_error, "opinion bounds must satisfy o_min < o_max");
  }
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < (cfg.o_max - cfg.o_min) / 2.0)) {
    fail(Errc::validation_error, "epsilon must lie in (0, range/2)");
  }
  if (cfg.self_weights.empty()) {
    if (!(cfg.self_weight > 0.0) || !(cfg.self_weight < 1.0)) {
      fail(Errc::validation_error, "self_weight must lie strictly inside (0, 1)");
    }
  } else {
    for (double a : cfg.self_weights) {
      if (!(a > 0.0) || !(a < 1.0)) {
        fail(Errc::validation_error, "self_weights entries must lie strictly inside (0, 1)");
      }
    }
  }
  if (cfg.flip_count < 0) fail(Errc::validation_error, "flip_count must be >= 0");

  // A preset owns its figure's graph shape, perturbation and initial rule;
  // run-length and statistical knobs stay overridable.
  switch (cfg.preset) {
    case Preset::none:
      if (cfg.graph_file.empty() == cfg.faction_sizes.empty()) {
        fail(Errc::validation_error,
             "exactly one graph source required (graph file or faction sizes)");
      }
      break;
    case Preset::fig1:
    case Preset::fig3: {
      if (!cfg.graph_file.empty()) fail(Errc::validation_error, "preset supplies the graph");
      if (cfg.faction_sizes != std::vector<int>{5, 7}) {
        fail(Errc::validation_error, "this preset uses faction sizes [5, 7]");
      }
      const int want = cfg.preset == Preset::fig3 ? 3 : 0;
      if (cfg.flip_count != want) {
        fail(Errc::validation_error, "flip count is fixed by the preset");
      }
      if (cfg.init != InitRule::uniform_random) {
        fail(Errc::validation_error, "this preset uses random initial conditions");
      }
      break;
    }
    case Preset::fig2:
      if (!cfg.graph_file.empty()) fail(Errc::validation_error, "preset supplies the graph");
      if (cfg.faction_sizes != std::vector<int>{3, 4, 5}) {
        fail(Errc::validation_error, "this preset uses faction sizes [3, 4, 5]");
      }
      if (cfg.flip_count != 0) fail(Errc::validation_error, "flip count is fixed by the preset");
      if (cfg.init != InitRule::uniform_random) {
        fail(Errc::validation_error, "this preset uses random initial conditions");
      }
      break;
    case Preset::fluct_lemma:
      if (!cfg.graph_file.empty()) fail(Errc::validation_error, "preset supplies the graph");
      if (cfg.faction_sizes.size() != 3) {
        fail(Errc::validation_error, "the fluctuation preset uses three factions");
      }
      if (cfg.flip_count != 0) fail(Errc::validation_error, "flip count is fixed by the preset");
      if (cfg.init != InitRule::pinned) {
        fail(Errc::validation_error, "the fluctuation preset pins the first two factions");
      }
      break;
  }
}

namespace {

// All members of block `f` within tol of `bound` at state `x`.
bool faction_at_bound(std::span<const double> x, const FactionPartition& partition, int f,
                      double bound, double tol) {
  for (int v : partition.blocks[static_cast<std::size_t>(f)]) {
    if (std::abs(x[static_cast<std::size_t>(v)] - bound) > tol) return false;
  }
  return true;
}

TrialSummary summarize_trial(DetectorMode mode, const ExperimentConfig& cfg,
                             const MaterializedExperiment& mat, int trial, std::uint64_t seed,
                             const Trajectory& traj) {
  TrialSummary s;
  s.trial = trial;
  s.seed = seed;
  s.final_spread = spread(traj.final_state());

  switch (mode) {
    case DetectorMode::consensus: {
      const ConsensusVerdict v = detect_consensus(traj, cfg.tol);
      s.consensus = v;
      if (v.converged && v.value) {
        const auto x0 = traj.row(0);
        const auto [lo, hi] = std::minmax_element(x0.begin(), x0.end());
        s.consensus_in_hull = (*v.value >= *lo && *v.value <= *hi);
      }
      break;
    }
    case DetectorMode::polarization: {
      s.polarization = detect_polarization(traj, mat.partition, cfg.tol);
      s.absorbing_ok = absorbing_audit(traj, mat.partition);
      s.monotone_ok = extremum_monotone_audit(traj, mat.partition);
      break;
    }
    case DetectorMode::multi_faction: {
      const auto xf = traj.row(traj.recorded_count() - 1);
      const int k = mat.partition.block_count();
      int at_low = 0;
      int at_high = 0;
      std::vector<int> free_agents;
      for (int f = 0; f < k; ++f) {
        const bool lo = faction_at_bound(xf, mat.partition, f, mat.params.o_min, cfg.tol);
        const bool hi = faction_at_bound(xf, mat.partition, f, mat.params.o_max, cfg.tol);
        if (lo) {
          ++at_low;
        } else if (hi) {
          ++at_high;
        } else {
          const auto& block = mat.partition.blocks[static_cast<std::size_t>(f)];
          free_agents.insert(free_agents.end(), block.begin(), block.end());
        }
      }
      s.factions_at_bounds = at_low + at_high;
      bool two_polarized = (at_low == 1 && at_high == 1 && !free_agents.empty());
      if (!free_agents.empty()) {
        const FluctuationStats fs = fluctuation_stats(traj, free_agents, cfg.epsilon);
        double min_center = fs.agents.front().occupancy.center;
        for (const AgentFluctuation& a : fs.agents) {
          min_center = std::min(min_center, a.occupancy.center);
        }
        s.min_center_occupancy = min_center;
        two_polarized = two_polarized && min_center > 0.0;
      }
      s.two_polarized_one_fluctuating = two_polarized;
      break;
    }
    case DetectorMode::fluctuation: {
      std::vector<int> interior;
      for (std::size_t f = 2; f < mat.partition.blocks.size(); ++f) {
        const auto& block = mat.partition.blocks[f];
        interior.insert(interior.end(), block.begin(), block.end());
      }
      if (!interior.empty()) {
        const FluctuationStats fs = fluctuation_stats(traj, interior, cfg.epsilon);
        std::int64_t vlo = fs.agents.front().visits_low;
        std::int64_t vhi = fs.agents.front().visits_high;
        std::int64_t cr = fs.agents.front().crossings;
        for (const AgentFluctuation& a : fs.agents) {
          vlo = std::min(vlo, a.visits_low);
          vhi = std::min(vhi, a.visits_high);
          cr = std::min(cr, a.crossings);
        }
        s.min_visits_low = vlo;
        s.min_visits_high = vhi;
        s.min_crossings = cr;
      }
      if (cfg.init == InitRule::pinned) {
        // the first two factions start at the bounds and must never move
        bool constant = true;
        const auto x0 = traj.row(0);
        for (std::size_t f = 0; f < 2 && f < mat.partition.blocks.size() && constant; ++f) {
          for (int v : mat.partition.blocks[f]) {
            const auto vi = static_cast<std::size_t>(v);
            for (std::size_t r = 1; r < traj.recorded_count(); ++r) {
              if (traj.row(r)[vi] != x0[vi]) {
                constant = false;
                break;
              }
            }
            if (!constant) break;
          }
        }
        s.pinned_constant = constant;
      }
      break;
    }
    case DetectorMode::perturbed: {
      std::vector<int> everyone(static_cast<std::size_t>(traj.n()));
      for (int v = 0; v < traj.n(); ++v) everyone[static_cast<std::size_t>(v)] = v;
      const FluctuationStats fs = fluctuation_stats(traj, everyone, cfg.epsilon);
      double sum = 0.0;
      for (const AgentFluctuation& a : fs.agents) sum += a.occupancy.low + a.occupancy.high;
      s.extreme_occupancy_mean = sum / static_cast<double>(fs.agents.size());
      break;
    }
  }
  return s;
}

// Nearest-rank quantile of an unsorted sample (copies, then sorts).
double nearest_rank(std::vector<double> sample, double p) {
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  if (rank < 1) rank = 1;
  return sample[rank - 1];
}

SummaryAggregate aggregate_trials(DetectorMode mode, const std::vector<TrialSummary>& trials) {
  SummaryAggregate agg;
  agg.trials = static_cast<int>(trials.size());
  const double n = static_cast<double>(trials.size());

  switch (mode) {
    case DetectorMode::consensus: {
      int converged = 0;
      bool all_hull = true;
      std::vector<double> hits;
      for (const TrialSummary& t : trials) {
        if (t.consensus && t.consensus->converged) {
          ++converged;
          if (t.consensus->value) agg.consensus_values.push_back(*t.consensus->value);
          if (t.consensus->hit_time) hits.push_back(static_cast<double>(*t.consensus->hit_time));
          all_hull = all_hull && t.consensus_in_hull.value_or(false);
        }
      }
      agg.fraction_converged = converged / n;
      agg.all_in_hull = all_hull;
      if (!hits.empty()) {
        agg.hit_p10 = nearest_rank(hits, 0.10);
        agg.hit_median = nearest_rank(hits, 0.50);
        agg.hit_p90 = nearest_rank(hits, 0.90);
      }
      break;
    }
    case DetectorMode::polarization: {
      int polarized = 0;
      bool all_abs = true;
      bool all_mono = true;
      std::vector<double> hits;
      for (const TrialSummary& t : trials) {
        if (t.polarization && t.polarization->polarized) {
          ++polarized;
          if (t.polarization->hit_time) {
            hits.push_back(static_cast<double>(*t.polarization->hit_time));
          }
        }
        all_abs = all_abs && t.absorbing_ok.value_or(false);
        all_mono = all_mono && t.monotone_ok.value_or(false);
      }
      agg.fraction_polarized = polarized / n;
      agg.all_absorbing = all_abs;
      agg.all_monotone = all_mono;
      if (!hits.empty()) {
        agg.hit_p10 = nearest_rank(hits, 0.10);
        agg.hit_median = nearest_rank(hits, 0.50);
        agg.hit_p90 = nearest_rank(hits, 0.90);
      }
      break;
    }
    case DetectorMode::multi_faction: {
      int good = 0;
      for (const TrialSummary& t : trials) {
        if (t.two_polarized_one_fluctuating.value_or(false)) ++good;
      }
      agg.two_polarized_fraction = good / n;
      break;
    }
    case DetectorMode::fluctuation: {
      bool all_pinned = true;
      std::optional<std::int64_t> vlo, vhi, cr;
      for (const TrialSummary& t : trials) {
        all_pinned = all_pinned && t.pinned_constant.value_or(true);
        auto take_min = [](std::optional<std::int64_t>& acc, std::optional<std::int64_t> v) {
          if (v) acc = acc ? std::min(*acc, *v) : *v;
        };
        take_min(vlo, t.min_visits_low);
        take_min(vhi, t.min_visits_high);
        take_min(cr, t.min_crossings);
      }
      agg.all_pinned_constant = all_pinned;
      agg.min_visits_low = vlo;
      agg.min_visits_high = vhi;
      agg.min_crossings = cr;
      break;
    }
    case DetectorMode::perturbed: {
      double sum = 0.0;
      for (const TrialSummary& t : trials) sum += t.extreme_occupancy_mean.value_or(0.0);
      agg.mean_extreme_occupancy = sum / n;
      break;
    }
  }
  return agg;
}

}  // namespace

const char* preset_name(Preset p) {
  switch (p) {
    case Preset::none: return "none";
    case Preset::fig1: return "fig1";
    case Preset::fig2: return "fig2";
    case Preset::fig3: return "fig3";
    case Preset::fluct_lemma: return "fluct_lemma";
  }
  return "none";
}

Preset preset_from_name(const std::string& name) {
  if (name == "none") return Preset::none;
  if (name == "fig1") return Preset::fig1;
  if (name == "fig2") return Preset::fig2;
  if (name == "fig3") return Preset::fig3;
  if (name == "fluct_lemma") return Preset::fluct_lemma;
  fail(Errc::unknown_preset, "unknown preset '" + name +
                                 "' (expected fig1, fig2, fig3 or fluct_lemma)");
}

ExperimentConfig make_preset(Preset preset, double a) {
  if (!(a > 0.0) || !(a < 1.0)) {
    fail(Errc::invalid_weight, "self-weight must lie strictly inside (0, 1)");
  }
  ExperimentConfig cfg;
  cfg.preset = preset;
  cfg.self_weight = a;
  switch (preset) {
    case Preset::none:
      fail(Errc::unknown_preset, "'none' is not a runnable preset");
    case Preset::fig1:
      cfg.faction_sizes = {5, 7};
      break;
    case Preset::fig2:
      cfg.faction_sizes = {3, 4, 5};
      break;
    case Preset::fig3:
      cfg.faction_sizes = {5, 7};
      cfg.flip_count = 3;
      break;
    case Preset::fluct_lemma:
      cfg.faction_sizes = {3, 4, 5};
      cfg.horizon = 1000000;
      cfg.trials = 20;
      cfg.init = InitRule::pinned;
      break;
  }
  return cfg;
}

ExperimentConfig make_preset(const std::string& name, double a) {
  return make_preset(preset_from_name(name), a);
}

MaterializedExperiment materialize(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);

  SignedGraph g = cfg.graph_file.empty()
                      ? generate_complete_clustered(cfg.faction_sizes).first
                      : read_graph_file(cfg.graph_file);

  std::vector<Edge> flipped;
  if (cfg.flip_count > 0) {
    if (!cfg.seed) fail(Errc::validation_error, "sign flips need a master seed");
    Rng graph_rng(derive_seed(*cfg.seed, kGraphStream));
    auto [perturbed, edges] = perturb_flip_edges(g, cfg.flip_count, graph_rng);
    g = std::move(perturbed);
    flipped = std::move(edges);
  }

  const int n = g.vertex_count();
  ModelParams params;
  if (cfg.self_weights.empty()) {
    params = ModelParams::uniform(cfg.o_min, cfg.o_max, cfg.self_weight, n);
  } else {
    params.o_min = cfg.o_min;
    params.o_max = cfg.o_max;
    params.self_weights = cfg.self_weights;
    params.validate(n);
  }

  FactionPartition partition = positive_components(g);
  EdgeDistribution dist = EdgeDistribution::uniform(g);
  return {std::move(g), std::move(partition), std::move(flipped), std::move(params),
          std::move(dist)};
}

std::vector<double> initial_state(const ExperimentConfig& cfg, const FactionPartition& partition,
                                  const ModelParams& params, Rng& rng) {
  const auto n = partition.block_index.size();
  std::vector<double> x(n);
  if (cfg.init == InitRule::uniform_random) {
    for (auto& v : x) v = rng.next_in(params.o_min, params.o_max);
    return x;
  }

  // pinned: first faction at o_min, second at o_max, everyone else strictly
  // interior. Draws happen in agent index order; pinned agents consume none.
  if (partition.block_count() < 2) {
    fail(Errc::wrong_faction_count, "pinned initial conditions need at least two factions");
  }
  for (std::size_t v = 0; v < n; ++v) {
    const int b = partition.block_index[v];
    if (b == 0) {
      x[v] = params.o_min;
    } else if (b == 1) {
      x[v] = params.o_max;
    } else {
      double val = rng.next_in(params.o_min, params.o_max);
      while (val <= params.o_min || val >= params.o_max) {
        val = rng.next_in(params.o_min, params.o_max);
      }
      x[v] = val;
    }
  }
  return x;
}

const char* detector_mode_name(DetectorMode mode) {
  switch (mode) {
    case DetectorMode::consensus: return "consensus";
    case DetectorMode::polarization: return "polarization";
    case DetectorMode::multi_faction: return "multi_faction";
    case DetectorMode::perturbed: return "perturbed";
    case DetectorMode::fluctuation: return "fluctuation";
  }
  return "consensus";
}

DetectorMode detector_mode(const ExperimentConfig& cfg, const FactionPartition& partition) {
  switch (cfg.preset) {
    case Preset::fig1: return DetectorMode::polarization;
    case Preset::fig2: return DetectorMode::multi_faction;
    case Preset::fig3: return DetectorMode::perturbed;
    case Preset::fluct_lemma: return DetectorMode::fluctuation;
    case Preset::none: break;
  }
  const int k = partition.block_count();
  if (k == 1) return DetectorMode::consensus;
  if (k == 2) return DetectorMode::polarization;
  return DetectorMode::multi_faction;
}

ExperimentSummary run_monte_carlo(const ExperimentConfig& cfg, unsigned workers) {
  validate_experiment_config(cfg);
  if (!cfg.seed) fail(Errc::validation_error, "monte carlo runs need a master seed");

  const MaterializedExperiment mat = materialize(cfg);
  const DetectorMode mode = detector_mode(cfg, mat.partition);
  const int trials = cfg.trials;
  std::vector<TrialSummary> summaries(static_cast<std::size_t>(trials));

  auto run_one = [&](int i) {
    const std::uint64_t trial_seed = derive_seed(*cfg.seed, static_cast<std::uint64_t>(i));
    Rng rng(trial_seed);
    const std::vector<double> x0 = initial_state(cfg, mat.partition, mat.params, rng);
    const Trajectory traj = run_trajectory(mat.graph, mat.dist, mat.params, x0, cfg.horizon, rng,
                                           cfg.record_stride);
    summaries[static_cast<std::size_t>(i)] =
        summarize_trial(mode, cfg, mat, i, trial_seed, traj);
  };

  unsigned nworkers = workers;
  if (nworkers == 0) nworkers = std::max(1u, std::thread::hardware_concurrency());
  nworkers = std::min<unsigned>(nworkers, static_cast<unsigned>(trials));

  if (nworkers <= 1) {
    for (int i = 0; i < trials; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= trials) return;
        try {
          run_one(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      pool.reserve(nworkers);
      for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentSummary summary;
  summary.config = cfg;
  summary.mode = mode;
  summary.flipped_edges = mat.flipped_edges;
  summary.aggregate = aggregate_trials(mode, summaries);
  summary.trials = std::move(summaries);
  return summary;
}

ConsensusSamples consensus_value_samples(const ExperimentConfig& cfg) {
  const MaterializedExperiment mat = materialize(cfg);
  if (mat.partition.block_count() != 1) {
    fail(Errc::not_single_faction, "consensus sampling needs a single-faction graph");
  }
  const ExperimentSummary summary = run_monte_carlo(cfg);

  ConsensusSamples out;
  out.all_converged = true;
  out.all_in_hull = true;
  for (const TrialSummary& t : summary.trials) {
    const bool converged = t.consensus && t.consensus->converged;
    out.all_converged = out.all_converged && converged;
    if (converged && t.consensus->value) {
      out.values.push_back(*t.consensus->value);
      const bool hull = t.consensus_in_hull.value_or(false);
      if (!hull) {
        fail(Errc::validation_error, "consensus value escaped the initial opinion hull");
      }
      out.all_in_hull = out.all_in_hull && hull;
    }
  }
  return out;
}

}  // namespace boomerang
