#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boomerang/analysis.hpp"
#include "boomerang/dynamics.hpp"
#include "boomerang/graph.hpp"

namespace boomerang {

enum class Preset { none, fig1, fig2, fig3, fluct_lemma };

const char* preset_name(Preset p);
Preset preset_from_name(const std::string& name);  // throws unknown_preset

enum class InitRule {
  uniform_random,  // i.i.d. uniform on the opinion interval
  pinned,          // faction 0 at o_min, faction 1 at o_max, the rest uniform interior
};

// Full experiment description. A preset fills in its figure's graph and knobs;
// numeric fields can then be overridden, graph sources cannot (except the
// fluctuation preset, which accepts custom faction sizes with >= 3 factions).
struct ExperimentConfig {
  Preset preset = Preset::none;
  std::string graph_file;          // custom graph from file ...
  std::vector<int> faction_sizes;  // ... or a generated complete clustered graph
  double o_min = 0.0;
  double o_max = 1.0;
  double self_weight = 0.5;
  std::vector<double> self_weights;  // optional per-agent override
  std::int64_t horizon = 200000;
  int trials = 100;
  std::optional<std::uint64_t> seed;
  double tol = 1e-3;
  double epsilon = 0.1;
  int flip_count = 0;  // seeded sign flips applied to the materialized graph
  InitRule init = InitRule::uniform_random;
  std::int64_t record_stride = 1;
};

// Preset defaults with uniform self-weight `a` (validated). Horizons are fixed
// constants per preset: 200000 for the figure presets, 10^6 for the
// fluctuation preset (which also defaults to 20 trials and pinned init).
ExperimentConfig make_preset(Preset preset, double a);
ExperimentConfig make_preset(const std::string& name, double a);

// Field-range checks plus the preset locks (a preset owns its figure's graph
// shape, perturbation count and initial rule). Throws validation_error.
void validate_experiment_config(const ExperimentConfig& cfg);

// Graph, partition, params and sampling distribution implied by a config.
// Sign flips (flip_count > 0) consume the reserved graph stream of the master
// seed, so the perturbed graph is one fixed draw shared by all trials.
struct MaterializedExperiment {
  SignedGraph graph;
  FactionPartition partition;
  std::vector<Edge> flipped_edges;
  ModelParams params;
  EdgeDistribution dist;
};

MaterializedExperiment materialize(const ExperimentConfig& cfg);

// Initial opinions for one trial, drawn from the trial's stream in agent order.
std::vector<double> initial_state(const ExperimentConfig& cfg, const FactionPartition& partition,
                                  const ModelParams& params, Rng& rng);

// Which detector family summarize applies; derived from the preset, or from
// the faction count for custom configs.
enum class DetectorMode { consensus, polarization, multi_faction, perturbed, fluctuation };

const char* detector_mode_name(DetectorMode mode);

DetectorMode detector_mode(const ExperimentConfig& cfg, const FactionPartition& partition);

struct TrialSummary {
  int trial = 0;
  std::uint64_t seed = 0;
  double final_spread = 0.0;
  // consensus mode
  std::optional<ConsensusVerdict> consensus;
  std::optional<bool> consensus_in_hull;
  // polarization mode
  std::optional<PolarizationVerdict> polarization;
  std::optional<bool> absorbing_ok;
  std::optional<bool> monotone_ok;
  // multi-faction mode
  std::optional<int> factions_at_bounds;
  std::optional<bool> two_polarized_one_fluctuating;
  std::optional<double> min_center_occupancy;
  // fluctuation mode
  std::optional<std::int64_t> min_visits_low;
  std::optional<std::int64_t> min_visits_high;
  std::optional<std::int64_t> min_crossings;
  std::optional<bool> pinned_constant;
  // perturbed mode
  std::optional<double> extreme_occupancy_mean;
};

struct SummaryAggregate {
  int trials = 0;
  std::optional<double> fraction_converged;
  std::optional<double> fraction_polarized;
  std::optional<double> hit_p10;
  std::optional<double> hit_median;
  std::optional<double> hit_p90;
  std::optional<bool> all_in_hull;
  std::optional<bool> all_absorbing;
  std::optional<bool> all_monotone;
  std::optional<bool> all_pinned_constant;
  std::optional<double> two_polarized_fraction;
  std::optional<std::int64_t> min_visits_low;
  std::optional<std::int64_t> min_visits_high;
  std::optional<std::int64_t> min_crossings;
  std::optional<double> mean_extreme_occupancy;
  std::vector<double> consensus_values;  // consensus mode, one per converged trial
};

struct ExperimentSummary {
  ExperimentConfig config;
  DetectorMode mode = DetectorMode::consensus;
  std::vector<Edge> flipped_edges;
  std::vector<TrialSummary> trials;
  SummaryAggregate aggregate;
};

// Runs config.trials independent trajectories (trial i uses the stream derived
// from the master seed at index i) and aggregates in trial order, so the
// result does not depend on `workers`. workers = 0 picks a machine default.
ExperimentSummary run_monte_carlo(const ExperimentConfig& cfg, unsigned workers = 0);

// Per-trial consensus values for single-faction graphs, plus the convex-hull
// check of each value against its trial's initial opinions.
struct ConsensusSamples {
  std::vector<double> values;
  bool all_converged = false;
  bool all_in_hull = false;
};

ConsensusSamples consensus_value_samples(const ExperimentConfig& cfg);

}  // namespace boomerang
