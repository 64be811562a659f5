#include "boomerang/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace boomerang {

namespace {

void require_two_factions(const FactionPartition& partition) {
  if (partition.block_count() != 2)
    fail(Errc::wrong_faction_count,
         "expected exactly 2 factions, got " + std::to_string(partition.block_count()));
}

void require_nonempty(const Trajectory& traj) {
  if (traj.recorded_count() == 0)
    fail(Errc::validation_error, "trajectory has no recorded states");
}

std::pair<double, double> block_min_max(std::span<const double> x,
                                        const std::vector<int>& block) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int v : block) {
    lo = std::min(lo, x[static_cast<std::size_t>(v)]);
    hi = std::max(hi, x[static_cast<std::size_t>(v)]);
  }
  return {lo, hi};
}

}  // namespace

double spread(std::span<const double> x) {
  if (x.empty()) fail(Errc::validation_error, "spread of an empty state");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double spread(const OpinionState& s) { return spread(std::span<const double>(s.x)); }

SeparationClass classify_separation(std::span<const double> x,
                                    const FactionPartition& partition) {
  require_two_factions(partition);
  const auto [lo0, hi0] = block_min_max(x, partition.blocks[0]);
  const auto [lo1, hi1] = block_min_max(x, partition.blocks[1]);
  SeparationClass r;
  if (hi0 < lo1) {
    r.z = 2;
    r.low_faction = 0;
    r.high_faction = 1;
    r.gap = lo1 - hi0;
  } else if (hi1 < lo0) {
    r.z = 2;
    r.low_faction = 1;
    r.high_faction = 0;
    r.gap = lo0 - hi1;
  }
  return r;
}

SeparationClass classify_separation(const OpinionState& s, const FactionPartition& partition) {
  return classify_separation(std::span<const double>(s.x), partition);
}

ExtremumSeries extremum_series(const Trajectory& traj, const FactionPartition& partition) {
  require_two_factions(partition);
  require_nonempty(traj);

  const std::size_t count = traj.recorded_count();
  std::size_t first = count;
  SeparationClass at_first;
  for (std::size_t k = 0; k < count; ++k) {
    const SeparationClass c = classify_separation(traj.row(k), partition);
    if (c.z == 2) {
      first = k;
      at_first = c;
      break;
    }
  }
  if (first == count) fail(Errc::never_separated, "no recorded state is separated");

  ExtremumSeries s;
  s.low_faction = at_first.low_faction;
  s.high_faction = at_first.high_faction;
  s.first_separated_index = first;
  s.times = traj.times;
  s.theta_low.reserve(count);
  s.theta_high.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto x = traj.row(k);
    s.theta_low.push_back(block_min_max(x, partition.blocks[s.low_faction]).second);
    s.theta_high.push_back(block_min_max(x, partition.blocks[s.high_faction]).first);
  }
  return s;
}

bool extremum_monotone(const ExtremumSeries& series) {
  for (std::size_t k = series.first_separated_index + 1; k < series.theta_low.size(); ++k) {
    if (series.theta_low[k] > series.theta_low[k - 1]) return false;
    if (series.theta_high[k] < series.theta_high[k - 1]) return false;
  }
  return true;
}

bool extremum_monotone_audit(const Trajectory& traj, const FactionPartition& partition) {
  try {
    return extremum_monotone(extremum_series(traj, partition));
  } catch (const Error& e) {
    if (e.code() == Errc::never_separated) return true;
    throw;
  }
}

bool absorbing_audit(const Trajectory& traj, const FactionPartition& partition) {
  require_two_factions(partition);
  require_nonempty(traj);
  SeparationClass prev = classify_separation(traj.row(0), partition);
  for (std::size_t k = 1; k < traj.recorded_count(); ++k) {
    const SeparationClass cur = classify_separation(traj.row(k), partition);
    if (prev.z == 2 && (cur.z != 2 || cur.low_faction != prev.low_faction)) return false;
    prev = cur;
  }
  return true;
}

ConsensusVerdict detect_consensus(const Trajectory& traj, double tol) {
  require_nonempty(traj);
  if (!(tol > 0.0)) fail(Errc::validation_error, "tolerance must be positive");

  ConsensusVerdict v;
  const auto last = traj.row(traj.recorded_count() - 1);
  v.converged = spread(last) < tol;
  if (v.converged) {
    double sum = 0.0;
    for (double e : last) sum += e;
    v.value = sum / static_cast<double>(last.size());
    for (std::size_t k = 0; k < traj.recorded_count(); ++k) {
      if (spread(traj.row(k)) < tol) {
        v.hit_time = traj.times[k];
        break;
      }
    }
  }
  return v;
}

PolarizationVerdict detect_polarization(const Trajectory& traj,
                                        const FactionPartition& partition, double tol) {
  require_two_factions(partition);
  require_nonempty(traj);
  if (!(tol > 0.0)) fail(Errc::validation_error, "tolerance must be positive");
  const ModelParams& p = traj.params;

  auto at_bound = [&](std::span<const double> x, const std::vector<int>& block,
                      double bound) {
    for (int v : block)
      if (std::abs(x[static_cast<std::size_t>(v)] - bound) > tol) return false;
    return true;
  };
  auto oriented = [&](std::span<const double> x, int low, int high) {
    return at_bound(x, partition.blocks[low], p.o_min) &&
           at_bound(x, partition.blocks[high], p.o_max);
  };

  PolarizationVerdict v;
  const auto last = traj.row(traj.recorded_count() - 1);
  if (oriented(last, 0, 1)) {
    v.polarized = true;
    v.low_faction = 0;
    v.high_faction = 1;
  } else if (oriented(last, 1, 0)) {
    v.polarized = true;
    v.low_faction = 1;
    v.high_faction = 0;
  }
  if (v.polarized) {
    for (std::size_t k = 0; k < traj.recorded_count(); ++k) {
      if (oriented(traj.row(k), v.low_faction, v.high_faction)) {
        v.hit_time = traj.times[k];
        break;
      }
    }
  }
  return v;
}

FluctuationStats fluctuation_stats(const Trajectory& traj, const std::vector<int>& agents,
                                   double epsilon) {
  require_nonempty(traj);
  const ModelParams& p = traj.params;
  if (!(epsilon > 0.0) || !(epsilon < p.range() / 2.0))
    fail(Errc::invalid_epsilon, "band width must lie in (0, range/2), got " +
                                    std::to_string(epsilon));
  for (int a : agents)
    if (a < 0 || a >= traj.n())
      fail(Errc::index_out_of_range, "agent " + std::to_string(a) + " outside 0.." +
                                         std::to_string(traj.n() - 1));

  const double lo_edge = p.o_min + epsilon;
  const double hi_edge = p.o_max - epsilon;
  enum Band { none = 0, low, center, high };
  auto band_of = [&](double x) {
    if (x > p.o_min && x < lo_edge) return low;
    if (x > hi_edge && x < p.o_max) return high;
    if (x >= lo_edge && x <= hi_edge) return center;
    return none;  // exactly at a bound
  };

  FluctuationStats stats;
  stats.epsilon = epsilon;
  const std::size_t count = traj.recorded_count();
  for (int a : agents) {
    AgentFluctuation f;
    f.agent = a;
    std::int64_t in_low = 0, in_center = 0, in_high = 0;
    Band prev = none;
    Band last_extreme = none;
    for (std::size_t k = 0; k < count; ++k) {
      const Band b = band_of(traj.row(k)[static_cast<std::size_t>(a)]);
      if (b == low) ++in_low;
      else if (b == center) ++in_center;
      else if (b == high) ++in_high;
      if ((b == low || b == high) && b != prev) {
        if (b == low) ++f.visits_low;
        else ++f.visits_high;
        if (last_extreme != none && last_extreme != b) ++f.crossings;
        last_extreme = b;
      }
      prev = b;
    }
    const auto frac = [count](std::int64_t c) {
      return static_cast<double>(c) / static_cast<double>(count);
    };
    f.occupancy = {frac(in_low), frac(in_center), frac(in_high)};
    stats.agents.push_back(f);
  }
  return stats;
}

AnalysisReport analyze_trajectory(const Trajectory& traj, const FactionPartition& partition,
                                  double tol, double epsilon) {
  require_nonempty(traj);
  AnalysisReport r;
  r.tol = tol;
  r.epsilon = epsilon;
  r.final_spread = spread(traj.row(traj.recorded_count() - 1));
  r.consensus = detect_consensus(traj, tol);
  if (partition.block_count() == 2) {
    r.polarization = detect_polarization(traj, partition, tol);
    r.z_final = classify_separation(traj.row(traj.recorded_count() - 1), partition).z;
    r.absorbing_ok = absorbing_audit(traj, partition);
    try {
      const ExtremumSeries series = extremum_series(traj, partition);
      r.separation_time = series.times[series.first_separated_index];
      r.monotone_ok = extremum_monotone(series);
    } catch (const Error& e) {
      if (e.code() != Errc::never_separated) throw;
      r.monotone_ok = true;  // vacuous
    }
  }
  std::vector<int> all(static_cast<std::size_t>(traj.n()));
  for (int a = 0; a < traj.n(); ++a) all[static_cast<std::size_t>(a)] = a;
  r.fluctuation = fluctuation_stats(traj, all, epsilon);
  return r;
}

}  // namespace boomerang
