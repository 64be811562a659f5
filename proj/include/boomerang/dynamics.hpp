#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "boomerang/errors.hpp"
#include "boomerang/graph.hpp"
#include "boomerang/rng.hpp"

namespace boomerang {

// Opinion bounds and per-agent self-weights. Weights must lie strictly inside
// (0, 1); the bounds must satisfy o_min < o_max.
struct ModelParams {
  double o_min = 0.0;
  double o_max = 1.0;
  std::vector<double> self_weights;

  static ModelParams uniform(double o_min, double o_max, double a, int n);
  void validate(int n) const;
  double range() const { return o_max - o_min; }
};

// Sampling distribution over the edge set. Edges are kept in the graph's
// ascending (u, v) order and sampled by inverse CDF on a stored cumulative
// array, so a given rng stream selects the same edges on every platform.
class EdgeDistribution {
 public:
  static EdgeDistribution uniform(const SignedGraph& g);
  // probabilities aligned with g.edges(); must be positive and sum to 1
  // within 1e-12.
  static EdgeDistribution with_probabilities(const SignedGraph& g, std::vector<double> probs);

  const SignedEdge& sample(Rng& rng) const;
  double probability(std::size_t edge_index) const { return probs_[edge_index]; }
  std::size_t size() const { return edges_.size(); }
  const std::vector<SignedEdge>& edges() const { return edges_; }

 private:
  std::vector<SignedEdge> edges_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

struct OpinionState {
  std::vector<double> x;
  std::int64_t t = 0;

  int n() const { return static_cast<int>(x.size()); }
};

// One interaction on edge {i, j}: both endpoints update simultaneously from the
// time-t values. On a positive edge each endpoint moves toward the other by its
// complementary weight. On a negative edge the strictly lower endpoint moves
// toward o_min and the other endpoint - including both endpoints on an exact
// tie - moves toward o_max. Exactly the two endpoint coordinates change and the
// time index advances by one.
OpinionState pair_update(const OpinionState& s, Edge e, int sign, const ModelParams& p);

// In-place kernel used by the trajectory loops. Computes each new value as
// x + (1-a)*(target - x); with round-to-nearest this never leaves the closed
// interval spanned by x and target, so states stay in [o_min, o_max] bit-exactly.
namespace detail {
void apply_pair_update(std::span<double> x, int i, int j, int sign, const ModelParams& p);
// safety net for the documented rounding policy: values beyond 4 ulp outside
// the bounds abort; inside the band they clamp. Unreachable with the update
// form above, but kept as the enforcement point of the state invariant.
double enforce_bounds(double v, const ModelParams& p);
}  // namespace detail

// Trajectory of one run: the full edge log (one entry per step) plus states
// recorded every `record_stride` steps (t = 0 and the final state always
// included). States are stored row-major, n doubles per recorded time.
struct Trajectory {
  SignedGraph graph;
  ModelParams params;
  std::uint64_t seed = 0;  // informational; 0 for replays
  std::int64_t record_stride = 1;
  std::vector<std::int64_t> times;
  std::vector<double> states;
  std::vector<Edge> edge_log;

  int n() const { return graph.vertex_count(); }
  std::size_t recorded_count() const { return times.size(); }
  std::span<const double> row(std::size_t idx) const {
    return {states.data() + idx * static_cast<std::size_t>(n()), static_cast<std::size_t>(n())};
  }
  OpinionState state_at(std::size_t idx) const {
    auto r = row(idx);
    return {{r.begin(), r.end()}, times[idx]};
  }
  OpinionState final_state() const { return state_at(recorded_count() - 1); }
};

// Optional early-exit rule, evaluated on each recorded state.
using StopRule = std::function<bool(const OpinionState&)>;

// Runs `horizon` sampled steps from x0 (validated against the bounds). The rng
// stream is consumed only by edge sampling; initial conditions are the caller's
// responsibility so that trial seeding stays in one place.
Trajectory run_trajectory(const SignedGraph& g, const EdgeDistribution& dist,
                          const ModelParams& p, const std::vector<double>& x0,
                          std::int64_t horizon, Rng& rng, std::int64_t record_stride = 1,
                          const StopRule& stop = nullptr);

// Deterministically replays an explicit edge sequence. Every edge must exist in
// the graph. Bit-identical to the run that produced the sequence.
Trajectory replay_sequence(const SignedGraph& g, const ModelParams& p,
                           const std::vector<double>& x0, const std::vector<Edge>& sequence,
                           std::int64_t record_stride = 1);

// Constructs a finite edge sequence that, replayed on a graph with the 2-sign
// arrangement property, brings |x_i - x_j| below epsilon when i and j share a
// faction (certified for every initial state) or above range - epsilon when
// they do not (certified for every initial state outside a measure-zero set of
// exact ties; see the implementation notes). Throws when the graph is not a
// 2-sign arrangement, epsilon is out of range, or the certified construction
// would exceed 10^6 edges.
std::vector<Edge> build_proximity_sequence(const SignedGraph& g, const FactionPartition& partition,
                                           const ModelParams& p, int i, int j, double epsilon);

}  // namespace boomerang
