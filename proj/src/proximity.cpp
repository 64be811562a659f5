#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "boomerang/dynamics.hpp"

namespace boomerang {

namespace {

constexpr std::size_t kEdgeCap = 1000000;

[[noreturn]] void too_long(std::size_t have) {
  fail(Errc::sequence_too_long,
       "certified construction exceeded the " + std::to_string(kEdgeCap) +
           "-edge cap (emitted " + std::to_string(have) + ")");
}

// BFS shortest path from `from` to `to` using positive edges only.
std::vector<int> positive_path(const SignedGraph& g, int from, int to) {
  if (from == to) return {from};
  std::vector<int> prev(static_cast<std::size_t>(g.vertex_count()), -1);
  std::deque<int> queue{from};
  prev[from] = from;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& [w, sign] : g.neighbors(v)) {
      if (sign > 0 && prev[w] < 0) {
        prev[w] = v;
        if (w == to) {
          std::vector<int> path{to};
          for (int cur = to; cur != from; cur = prev[cur]) path.push_back(prev[cur]);
          std::reverse(path.begin(), path.end());
          return path;
        }
        queue.push_back(w);
      }
    }
  }
  fail(Errc::no_path, "no all-positive path between " + std::to_string(from) + " and " +
                          std::to_string(to));
}

std::vector<int> bfs_positive_distances(const SignedGraph& g, int from) {
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& [w, sign] : g.neighbors(v)) {
      if (sign > 0 && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

// Same-faction closeness. Positive-edge updates are linear, so the state after
// replaying a sequence is P * x(0) with P the running product of the per-edge
// row-stochastic update matrices. The worst case of |x_i - x_j| over all
// initial states in the box is exactly (range/2) * ||P_i - P_j||_1, which we
// drive below the target by sweeping the shortest positive path between i and
// j, far end first. The certificate is valid for every initial state.
std::vector<Edge> build_same_faction(const SignedGraph& g, const ModelParams& p, int i, int j,
                                     double epsilon) {
  std::vector<Edge> seq;
  if (i == j) return seq;

  const std::vector<int> path = positive_path(g, i, j);
  const std::size_t L = path.size();  // i = path[0], j = path[L-1]

  // row-stochastic product restricted to path vertices (only they are touched)
  std::vector<std::size_t> slot(static_cast<std::size_t>(g.vertex_count()), 0);
  for (std::size_t k = 0; k < L; ++k) slot[static_cast<std::size_t>(path[k])] = k;
  std::vector<std::vector<double>> rows(L, std::vector<double>(L, 0.0));
  for (std::size_t k = 0; k < L; ++k) rows[k][k] = 1.0;

  // 5% slack absorbs floating-point drift of the replayed trajectory relative
  // to the real-arithmetic product (at most a few 1e-10 over the edge cap).
  const double target = 0.95 * epsilon;
  auto certified_gap = [&]() {
    double sum = 0.0;
    for (std::size_t c = 0; c < L; ++c) sum += std::abs(rows[0][c] - rows[L - 1][c]);
    return 0.5 * p.range() * sum;
  };

  while (certified_gap() >= target) {
    for (std::size_t k = L - 1; k-- > 0;) {
      const int a = path[k];
      const int b = path[k + 1];
      seq.push_back({std::min(a, b), std::max(a, b)});
      const std::size_t sa = slot[static_cast<std::size_t>(a)];
      const std::size_t sb = slot[static_cast<std::size_t>(b)];
      const double wa = p.self_weights[static_cast<std::size_t>(a)];
      const double wb = p.self_weights[static_cast<std::size_t>(b)];
      for (std::size_t c = 0; c < L; ++c) {
        const double ra = rows[sa][c];
        const double rb = rows[sb][c];
        rows[sa][c] = wa * ra + (1.0 - wa) * rb;
        rows[sb][c] = wb * rb + (1.0 - wb) * ra;
      }
    }
    if (seq.size() > kEdgeCap) too_long(seq.size());
  }
  return seq;
}

// Cross-faction separation. One negative edge {u, v} between the factions is
// designated and "pumped": once its endpoints are strictly ordered, every
// repeat moves the lower one toward o_min and the upper one toward o_max, so
// each endpoint's deficit from its locked extreme U (resp. V) shrinks by its
// self-weight per pump. The certificate tracks, per touched vertex, a sound
// upper bound beta[p] on |x_p - U_side|:
//
//   positive {p, q}:   beta_p' = a_p beta_p + (1-a_p) beta_q   (and symmetric)
//   negative {u, v}:   beta_u' = a_u beta_u,  beta_v' = a_v beta_v,
//                      valid when u, v are certifiably still ordered.
//
// Consecutive pumps preserve strict order structurally; after a positive touch
// of u or v the next pump requires beta_u + beta_v < range. The schedule
// (pump to a resting level delta0, push one wave along each faction's path,
// re-pump immediately after the endpoint is touched) keeps that certified with
// delta0 <= min(a_u, a_v) * range / 4. Waves repeat until the bound at both
// targets is below 0.45 * epsilon, leaving 0.1 * epsilon of slack: half for
// the unknown orientation being symmetric, half for floating-point drift.
//
// The first pump assumes its endpoints are not exactly tied (strict order
// then locks the orientation). A 2-edge prefix (one pump plus one positive
// update with a faction mate) breaks the natural all-equal start; exact ties
// surviving that prefix form a measure-zero set on which no fixed finite
// sequence can work at all (the all-o_max state is a fixed point of every
// update).
class CrossBuilder {
 public:
  CrossBuilder(const SignedGraph& g, const ModelParams& p)
      : g_(g), p_(p), beta_(static_cast<std::size_t>(g.vertex_count()), p.range()) {}

  std::vector<Edge> build(const std::vector<int>& path_a, const std::vector<int>& path_b,
                          double epsilon) {
    const int u = path_a.front();
    const int v = path_b.front();
    const int i = path_a.back();
    const int j = path_b.back();
    const double au = weight(u);
    const double av = weight(v);
    const double eps_half = 0.45 * epsilon;
    const double delta0 = std::min(std::min(au, av) * p_.range() / 4.0, eps_half / 2.0);

    emit_tie_breaker(u, v, path_a, path_b);
    pump_to(u, v, delta0);
    while (beta_[static_cast<std::size_t>(i)] > eps_half ||
           beta_[static_cast<std::size_t>(j)] > eps_half) {
      wave(path_a, u, v, delta0);
      wave(path_b, u, v, delta0);
      if (seq_.size() > kEdgeCap) too_long(seq_.size());
    }
    return std::move(seq_);
  }

 private:
  double weight(int vertex) const { return p_.self_weights[static_cast<std::size_t>(vertex)]; }

  void emit(int a, int b) {
    seq_.push_back({std::min(a, b), std::max(a, b)});
    if (seq_.size() > kEdgeCap) too_long(seq_.size());
  }

  void emit_neg(int u, int v) {
    if (locked_ && !uv_clean_) {
      // a positive update touched an endpoint since the last pump; order must
      // be re-certified before this emission is sound
      const double sum = beta_[static_cast<std::size_t>(u)] + beta_[static_cast<std::size_t>(v)];
      if (!(sum < p_.range() * (1.0 - 1e-9)))
        fail(Errc::sequence_too_long, "internal: lost the ordering certificate");
    }
    emit(u, v);
    if (!locked_) {
      locked_ = true;
      beta_[static_cast<std::size_t>(u)] = weight(u) * p_.range();
      beta_[static_cast<std::size_t>(v)] = weight(v) * p_.range();
    } else {
      beta_[static_cast<std::size_t>(u)] *= weight(u);
      beta_[static_cast<std::size_t>(v)] *= weight(v);
    }
    uv_clean_ = true;
  }

  void emit_pos(int a, int b, int u, int v) {
    emit(a, b);
    const double ba = beta_[static_cast<std::size_t>(a)];
    const double bb = beta_[static_cast<std::size_t>(b)];
    const double wa = weight(a);
    const double wb = weight(b);
    beta_[static_cast<std::size_t>(a)] = wa * ba + (1.0 - wa) * bb;
    beta_[static_cast<std::size_t>(b)] = wb * bb + (1.0 - wb) * ba;
    if (a == u || b == u || a == v || b == v) uv_clean_ = false;
  }

  void pump_to(int u, int v, double level) {
    while (beta_[static_cast<std::size_t>(u)] > level ||
           beta_[static_cast<std::size_t>(v)] > level)
      emit_neg(u, v);
  }

  void wave(const std::vector<int>& path, int u, int v, double delta0) {
    for (std::size_t k = 1; k < path.size(); ++k) {
      emit_pos(path[k - 1], path[k], u, v);
      if (k == 1) pump_to(u, v, delta0);  // the wave just diluted an endpoint
    }
  }

  // one pump plus one positive update with a faction mate; breaks the
  // all-equal tie before the certified phase starts
  void emit_tie_breaker(int u, int v, const std::vector<int>& path_a,
                        const std::vector<int>& path_b) {
    int mate = -1;
    int anchor = u;
    if (path_a.size() > 1) {
      mate = path_a[1];
    } else {
      for (const auto& [w, sign] : g_.neighbors(u))
        if (sign > 0) {
          mate = w;
          break;
        }
    }
    if (mate < 0) {
      anchor = v;
      if (path_b.size() > 1) {
        mate = path_b[1];
      } else {
        for (const auto& [w, sign] : g_.neighbors(v))
          if (sign > 0) {
            mate = w;
            break;
          }
      }
    }
    emit(u, v);
    if (mate >= 0) emit(anchor, mate);
    // the prefix is uncertified; the machine starts fresh after it
    std::fill(beta_.begin(), beta_.end(), p_.range());
    locked_ = false;
    uv_clean_ = true;
  }

  const SignedGraph& g_;
  const ModelParams& p_;
  std::vector<double> beta_;
  std::vector<Edge> seq_;
  bool locked_ = false;
  bool uv_clean_ = true;
};

}  // namespace

std::vector<Edge> build_proximity_sequence(const SignedGraph& g, const FactionPartition& partition,
                                           const ModelParams& p, int i, int j, double epsilon) {
  const int n = g.vertex_count();
  p.validate(n);
  if (i < 0 || i >= n || j < 0 || j >= n)
    fail(Errc::index_out_of_range, "vertex pair (" + std::to_string(i) + "," + std::to_string(j) +
                                       ") outside 0.." + std::to_string(n - 1));
  if (!(epsilon > 0.0) || !(epsilon < p.range()))
    fail(Errc::invalid_epsilon, "epsilon must lie in (0, range), got " + std::to_string(epsilon));

  const ArrangementReport report = classify_arrangement(g);
  if (!report.satisfies_arrangement || report.k != 2)
    fail(Errc::arrangement_violated,
         "graph is not a 2-sign arrangement (connected=" +
             std::string(report.connected ? "yes" : "no") + ", k=" + std::to_string(report.k) +
             ", violating_edges=" + std::to_string(report.violating_edges.size()) + ")");
  const FactionPartition fresh = positive_components(g);
  if (partition.blocks != fresh.blocks)
    fail(Errc::validation_error, "partition argument does not match the graph's factions");

  if (partition.block_of(i) == partition.block_of(j)) return build_same_faction(g, p, i, j, epsilon);

  // designate the negative edge minimizing the positive-path distance to the
  // two targets; ties resolve to the lexicographically smallest edge
  const std::vector<int> dist_i = bfs_positive_distances(g, i);
  const std::vector<int> dist_j = bfs_positive_distances(g, j);
  const int block_i = partition.block_of(i);
  int best_u = -1, best_v = -1;
  long long best_cost = -1;
  for (const auto& se : g.edges()) {
    if (se.sign > 0) continue;
    int a = se.e.u, b = se.e.v;
    if (partition.block_of(a) != block_i) std::swap(a, b);
    if (partition.block_of(a) != block_i || partition.block_of(b) != partition.block_of(j))
      continue;
    if (dist_i[a] < 0 || dist_j[b] < 0) continue;
    const long long cost = static_cast<long long>(dist_i[a]) + dist_j[b];
    if (best_cost < 0 || cost < best_cost) {
      best_cost = cost;
      best_u = a;
      best_v = b;
    }
  }
  if (best_u < 0) fail(Errc::no_path, "no negative edge joins the two factions");  // unreachable

  std::vector<int> path_a = positive_path(g, best_u, i);
  std::vector<int> path_b = positive_path(g, best_v, j);
  return CrossBuilder(g, p).build(path_a, path_b, epsilon);
}

}  // namespace boomerang
