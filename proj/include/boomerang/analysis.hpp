#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boomerang/dynamics.hpp"
#include "boomerang/graph.hpp"

namespace boomerang {

double spread(std::span<const double> x);
double spread(const OpinionState& s);

// Dichotomy over two-faction states: z = 2 iff the factions are strictly
// separated (max over one faction < min over the other), else z = 1.
struct SeparationClass {
  int z = 1;
  int low_faction = -1;   // set when z == 2
  int high_faction = -1;  // set when z == 2
  double gap = 0.0;       // min(high) - max(low), set when z == 2
};

SeparationClass classify_separation(std::span<const double> x, const FactionPartition& partition);
SeparationClass classify_separation(const OpinionState& s, const FactionPartition& partition);

// Running extremes of the two factions across the recorded states, with roles
// (low/high) frozen at the first separated state. theta_low is the low
// faction's max, theta_high the high faction's min.
struct ExtremumSeries {
  int low_faction = -1;
  int high_faction = -1;
  std::size_t first_separated_index = 0;
  std::vector<std::int64_t> times;
  std::vector<double> theta_low;
  std::vector<double> theta_high;
};

// Throws never_separated when no recorded state has z == 2.
ExtremumSeries extremum_series(const Trajectory& traj, const FactionPartition& partition);

// Post-separation monotonicity: theta_low never increases and theta_high never
// decreases after the first separated state. Exact comparison - the update
// arithmetic guarantees this bit-exactly, so any violation is a real one.
bool extremum_monotone(const ExtremumSeries& series);
// Vacuously true when the trajectory never separates.
bool extremum_monotone_audit(const Trajectory& traj, const FactionPartition& partition);

// Once separated, always separated with the same orientation: checks the
// implication over every consecutive recorded pair. Vacuously true if no
// recorded state is separated.
bool absorbing_audit(const Trajectory& traj, const FactionPartition& partition);

struct ConsensusVerdict {
  bool converged = false;
  std::optional<double> value;          // mean of the final state, when converged
  std::optional<std::int64_t> hit_time;  // first recorded time with spread < tol
};

ConsensusVerdict detect_consensus(const Trajectory& traj, double tol);

struct PolarizationVerdict {
  bool polarized = false;
  int low_faction = -1;  // faction within tol of o_min at the final state
  int high_faction = -1;
  std::optional<std::int64_t> hit_time;  // first recorded time with this orientation in place
};

// Final state has one faction entirely within tol of o_min and the other
// entirely within tol of o_max (either orientation).
PolarizationVerdict detect_polarization(const Trajectory& traj, const FactionPartition& partition,
                                        double tol);

// Band bookkeeping near the opinion bounds: the open bands
// (o_min, o_min + eps) and (o_max - eps, o_max), and the closed center band
// [o_min + eps, o_max - eps]. Values exactly at a bound lie in no band, so
// occupancy fractions sum to 1 only for agents that stay strictly interior.
struct BandOccupancy {
  double low = 0.0;
  double center = 0.0;
  double high = 0.0;
};

struct AgentFluctuation {
  int agent = -1;
  std::int64_t visits_low = 0;   // entries into the low band (edge-triggered)
  std::int64_t visits_high = 0;  // entries into the high band
  std::int64_t crossings = 0;    // extreme-band entries whose previous extreme was the other band
  BandOccupancy occupancy;       // fraction of recorded states per band
};

struct FluctuationStats {
  double epsilon = 0.0;
  std::vector<AgentFluctuation> agents;
};

// Requires 0 < eps < (o_max - o_min) / 2.
FluctuationStats fluctuation_stats(const Trajectory& traj, const std::vector<int>& agents,
                                   double epsilon);

// Detector outputs bundled for one trajectory. Two-faction fields are only
// present when the partition has exactly two blocks.
struct AnalysisReport {
  double tol = 0.0;
  double epsilon = 0.0;
  double final_spread = 0.0;
  ConsensusVerdict consensus;
  std::optional<PolarizationVerdict> polarization;
  std::optional<int> z_final;
  std::optional<std::int64_t> separation_time;
  std::optional<bool> absorbing_ok;
  std::optional<bool> monotone_ok;
  FluctuationStats fluctuation;  // over all agents
};

AnalysisReport analyze_trajectory(const Trajectory& traj, const FactionPartition& partition,
                                  double tol, double epsilon);

}  // namespace boomerang
