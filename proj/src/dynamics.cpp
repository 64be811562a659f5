#include "boomerang/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

namespace boomerang {

ModelParams ModelParams::uniform(double o_min, double o_max, double a, int n) {
  ModelParams p;
  p.o_min = o_min;
  p.o_max = o_max;
  p.self_weights.assign(static_cast<std::size_t>(n), a);
  p.validate(n);
  return p;
}

void ModelParams::validate(int n) const {
  if (!(o_min < o_max))
    fail(Errc::validation_error, "opinion bounds need o_min < o_max, got [" +
                                     std::to_string(o_min) + ", " + std::to_string(o_max) + "]");
  if (!std::isfinite(o_min) || !std::isfinite(o_max))
    fail(Errc::validation_error, "opinion bounds must be finite");
  if (static_cast<int>(self_weights.size()) != n)
    fail(Errc::validation_error, "expected " + std::to_string(n) + " self-weights, got " +
                                     std::to_string(self_weights.size()));
  for (double a : self_weights) {
    if (!(a > 0.0) || !(a < 1.0))
      fail(Errc::invalid_weight, "self-weights must lie in (0, 1), got " + std::to_string(a));
  }
}

EdgeDistribution EdgeDistribution::uniform(const SignedGraph& g) {
  const std::size_t m = g.edges().size();
  if (m == 0) fail(Errc::empty_edge_set, "cannot sample edges of an edgeless graph");
  return with_probabilities(g, std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

EdgeDistribution EdgeDistribution::with_probabilities(const SignedGraph& g,
                                                      std::vector<double> probs) {
  if (g.edges().empty()) fail(Errc::empty_edge_set, "cannot sample edges of an edgeless graph");
  if (probs.size() != g.edges().size())
    fail(Errc::validation_error, "probability vector length " + std::to_string(probs.size()) +
                                     " does not match edge count " +
                                     std::to_string(g.edges().size()));
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) fail(Errc::validation_error, "edge probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    fail(Errc::validation_error,
         "edge probabilities sum to " + std::to_string(sum) + ", expected 1");

  EdgeDistribution d;
  d.edges_ = g.edges();
  d.probs_ = std::move(probs);
  d.cumulative_.resize(d.probs_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < d.probs_.size(); ++k) {
    acc += d.probs_[k];
    d.cumulative_[k] = acc;
  }
  d.cumulative_.back() = 1.0;  // guard the final bin against accumulated rounding
  return d;
}

const SignedEdge& EdgeDistribution::sample(Rng& rng) const {
  const double u = rng.next_double();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t idx =
      it == cumulative_.end() ? cumulative_.size() - 1
                              : static_cast<std::size_t>(it - cumulative_.begin());
  return edges_[idx];
}

namespace detail {

double enforce_bounds(double v, const ModelParams& p) {
  if (v >= p.o_min && v <= p.o_max) return v;
  // 4-ulp rounding band measured at the larger bound magnitude
  const double scale = std::max(std::abs(p.o_min), std::abs(p.o_max));
  const double band = 4.0 * (std::nextafter(scale, std::numeric_limits<double>::infinity()) - scale);
  if (v < p.o_min && p.o_min - v <= band) return p.o_min;
  if (v > p.o_max && v - p.o_max <= band) return p.o_max;
  std::fprintf(stderr, "internal error: opinion %.17g escaped [%.17g, %.17g]\n", v, p.o_min,
               p.o_max);
  std::abort();
}

void apply_pair_update(std::span<double> x, int i, int j, int sign, const ModelParams& p) {
  const double xi = x[i];
  const double xj = x[j];
  double ti, tj;
  if (sign > 0) {
    ti = xj;
    tj = xi;
  } else {
    ti = (xi < xj) ? p.o_min : p.o_max;
    tj = (xj < xi) ? p.o_min : p.o_max;
  }
  const double yi = xi + (1.0 - p.self_weights[static_cast<std::size_t>(i)]) * (ti - xi);
  const double yj = xj + (1.0 - p.self_weights[static_cast<std::size_t>(j)]) * (tj - xj);
  x[i] = (yi >= p.o_min && yi <= p.o_max) ? yi : enforce_bounds(yi, p);
  x[j] = (yj >= p.o_min && yj <= p.o_max) ? yj : enforce_bounds(yj, p);
}

}  // namespace detail

namespace {

void check_edge_in_graph(const SignedGraph& g, Edge e) {
  if (!g.sign_of(e.u, e.v))
    fail(Errc::unknown_edge,
         "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") is not in the graph");
}

void check_initial_state(const SignedGraph& g, const ModelParams& p,
                         const std::vector<double>& x0) {
  if (static_cast<int>(x0.size()) != g.vertex_count())
    fail(Errc::invalid_initial_opinion, "initial state has " + std::to_string(x0.size()) +
                                            " entries for " + std::to_string(g.vertex_count()) +
                                            " agents");
  for (double v : x0) {
    if (!(v >= p.o_min && v <= p.o_max))
      fail(Errc::invalid_initial_opinion,
           "initial opinion " + std::to_string(v) + " outside [" + std::to_string(p.o_min) +
               ", " + std::to_string(p.o_max) + "]");
  }
}

}  // namespace

OpinionState pair_update(const OpinionState& s, Edge e, int sign, const ModelParams& p) {
  const int n = s.n();
  p.validate(n);
  if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
    fail(Errc::invalid_edge,
         "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") invalid for n = " +
             std::to_string(n));
  if (sign != 1 && sign != -1) fail(Errc::invalid_sign, "sign must be +1 or -1");
  for (double v : s.x)
    if (!(v >= p.o_min && v <= p.o_max))
      fail(Errc::invalid_initial_opinion, "state outside opinion bounds");

  OpinionState out = s;
  detail::apply_pair_update(out.x, e.u, e.v, sign, p);
  out.t = s.t + 1;
  return out;
}

Trajectory run_trajectory(const SignedGraph& g, const EdgeDistribution& dist,
                          const ModelParams& p, const std::vector<double>& x0,
                          std::int64_t horizon, Rng& rng, std::int64_t record_stride,
                          const StopRule& stop) {
  p.validate(g.vertex_count());
  check_initial_state(g, p, x0);
  if (horizon < 0) fail(Errc::validation_error, "horizon must be >= 0");
  if (record_stride < 1) fail(Errc::validation_error, "record_stride must be >= 1");
  if (dist.size() != g.edges().size())
    fail(Errc::validation_error, "edge distribution does not match the graph's edge set");

  Trajectory traj;
  traj.graph = g;
  traj.params = p;
  traj.record_stride = record_stride;
  const std::size_t n = x0.size();
  traj.times.reserve(static_cast<std::size_t>(horizon / record_stride) + 2);
  traj.states.reserve((static_cast<std::size_t>(horizon / record_stride) + 2) * n);
  traj.edge_log.reserve(static_cast<std::size_t>(horizon));

  std::vector<double> x = x0;
  auto record = [&](std::int64_t t) {
    traj.times.push_back(t);
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  };
  record(0);
  if (stop && stop(OpinionState{x, 0})) return traj;

  for (std::int64_t t = 0; t < horizon; ++t) {
    const SignedEdge& se = dist.sample(rng);
    detail::apply_pair_update(x, se.e.u, se.e.v, se.sign, p);
    traj.edge_log.push_back(se.e);
    const std::int64_t now = t + 1;
    if (now % record_stride == 0 || now == horizon) {
      record(now);
      if (stop && now != horizon && stop(OpinionState{x, now})) break;
    }
  }
  return traj;
}

Trajectory replay_sequence(const SignedGraph& g, const ModelParams& p,
                           const std::vector<double>& x0, const std::vector<Edge>& sequence,
                           std::int64_t record_stride) {
  p.validate(g.vertex_count());
  check_initial_state(g, p, x0);
  if (record_stride < 1) fail(Errc::validation_error, "record_stride must be >= 1");
  for (const Edge& e : sequence) check_edge_in_graph(g, e);

  Trajectory traj;
  traj.graph = g;
  traj.params = p;
  traj.record_stride = record_stride;
  const std::int64_t horizon = static_cast<std::int64_t>(sequence.size());

  std::vector<double> x = x0;
  auto record = [&](std::int64_t t) {
    traj.times.push_back(t);
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  };
  record(0);
  for (std::int64_t t = 0; t < horizon; ++t) {
    const Edge e = sequence[static_cast<std::size_t>(t)];
    const int sign = *g.sign_of(e.u, e.v);
    detail::apply_pair_update(x, e.u, e.v, sign, p);
    traj.edge_log.push_back(e);
    const std::int64_t now = t + 1;
    if (now % record_stride == 0 || now == horizon) record(now);
  }
  return traj;
}

}  // namespace boomerang
