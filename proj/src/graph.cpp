#include "boomerang/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace boomerang {

SignedGraph SignedGraph::build(int n, const std::vector<std::tuple<int, int, int>>& edges) {
  if (n < 1) fail(Errc::invalid_sizes, "vertex count must be >= 1, got " + std::to_string(n));
  SignedGraph g;
  g.n_ = n;
  g.edges_.reserve(edges.size());
  for (const auto& [i, j, s] : edges) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      fail(Errc::index_out_of_range, "edge (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") outside 0.." + std::to_string(n - 1));
    if (i == j) fail(Errc::self_loop, "self loop at vertex " + std::to_string(i));
    if (s != 1 && s != -1)
      fail(Errc::invalid_sign, "edge (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") has sign " + std::to_string(s));
    g.edges_.push_back({{std::min(i, j), std::max(i, j)}, s});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  for (std::size_t k = 1; k < g.edges_.size(); ++k) {
    if (g.edges_[k].e == g.edges_[k - 1].e)
      fail(Errc::duplicate_edge, "edge (" + std::to_string(g.edges_[k].e.u) + "," +
                                     std::to_string(g.edges_[k].e.v) + ") appears twice");
  }
  g.adj_.assign(n, {});
  for (const auto& se : g.edges_) {
    if (se.sign > 0) ++g.positive_count_;
    g.adj_[se.e.u].emplace_back(se.e.v, se.sign);
    g.adj_[se.e.v].emplace_back(se.e.u, se.sign);
  }
  for (auto& lst : g.adj_) std::sort(lst.begin(), lst.end());
  return g;
}

std::optional<int> SignedGraph::sign_of(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || i == j) return std::nullopt;
  const Edge key{std::min(i, j), std::max(i, j)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                             [](const SignedEdge& se, const Edge& e) { return se.e < e; });
  if (it != edges_.end() && it->e == key) return it->sign;
  return std::nullopt;
}

bool SignedGraph::is_complete() const {
  return static_cast<long long>(edge_count()) * 2 == static_cast<long long>(n_) * (n_ - 1);
}

bool SignedGraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [w, sign] : adj_[v]) {
      (void)sign;
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n_;
}

FactionPartition positive_components(const SignedGraph& g) {
  const int n = g.vertex_count();
  FactionPartition p;
  p.block_index.assign(n, -1);
  for (int start = 0; start < n; ++start) {
    if (p.block_index[start] >= 0) continue;
    const int id = p.block_count();
    std::vector<int> block;
    std::vector<int> stack{start};
    p.block_index[start] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      block.push_back(v);
      for (const auto& [w, sign] : g.neighbors(v)) {
        if (sign > 0 && p.block_index[w] < 0) {
          p.block_index[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(block.begin(), block.end());
    p.blocks.push_back(std::move(block));
  }
  return p;
}

const char* balance_class_name(BalanceClass c) {
  switch (c) {
    case BalanceClass::structural_m1: return "structural_m1";
    case BalanceClass::structural_m2: return "structural_m2";
    case BalanceClass::clustering: return "clustering";
    case BalanceClass::none: return "none";
  }
  return "none";
}

ArrangementReport classify_arrangement(const SignedGraph& g) {
  ArrangementReport r;
  r.connected = g.is_connected();
  const FactionPartition p = positive_components(g);
  r.k = p.block_count();
  for (const auto& se : g.edges()) {
    if (se.sign < 0 && p.block_of(se.e.u) == p.block_of(se.e.v))
      r.violating_edges.push_back(se.e);
  }
  r.satisfies_arrangement = r.connected && g.vertex_count() >= 3 && r.violating_edges.empty();
  if (r.satisfies_arrangement && g.is_complete()) {
    if (r.k == 1)
      r.balance_class = BalanceClass::structural_m1;
    else if (r.k == 2)
      r.balance_class = BalanceClass::structural_m2;
    else
      r.balance_class = BalanceClass::clustering;
  }
  return r;
}

std::pair<SignedGraph, FactionPartition> generate_complete_clustered(
    const std::vector<int>& faction_sizes) {
  if (faction_sizes.empty()) fail(Errc::invalid_sizes, "faction size list is empty");
  long long n = 0;
  for (int s : faction_sizes) {
    if (s < 1) fail(Errc::invalid_sizes, "faction sizes must be positive, got " + std::to_string(s));
    n += s;
  }
  if (faction_sizes.size() > 1 && n < 3)
    fail(Errc::invalid_sizes, "clustered graphs need n >= 3, got n = " + std::to_string(n));

  std::vector<int> block_of(static_cast<std::size_t>(n));
  int v = 0;
  for (std::size_t b = 0; b < faction_sizes.size(); ++b)
    for (int k = 0; k < faction_sizes[b]; ++k) block_of[v++] = static_cast<int>(b);

  std::vector<std::tuple<int, int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      edges.emplace_back(i, j, block_of[i] == block_of[j] ? 1 : -1);

  SignedGraph g = SignedGraph::build(static_cast<int>(n), edges);
  FactionPartition p = positive_components(g);
  return {std::move(g), std::move(p)};
}

std::pair<SignedGraph, std::vector<Edge>> perturb_flip_edges(const SignedGraph& g, int count,
                                                             Rng& rng) {
  const int m = g.edge_count();
  if (count < 0 || count > m)
    fail(Errc::count_exceeds_edges,
         "cannot flip " + std::to_string(count) + " of " + std::to_string(m) + " edges");

  // partial Fisher-Yates over edge indices; selection order depends only on the rng stream
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < count; ++k) {
    const int j = k + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m - k)));
    std::swap(idx[k], idx[j]);
  }
  std::vector<char> flip(m, 0);
  std::vector<Edge> flipped;
  flipped.reserve(count);
  for (int k = 0; k < count; ++k) {
    flip[idx[k]] = 1;
    flipped.push_back(g.edges()[idx[k]].e);
  }
  std::sort(flipped.begin(), flipped.end());

  std::vector<std::tuple<int, int, int>> edges;
  edges.reserve(m);
  for (int k = 0; k < m; ++k) {
    const auto& se = g.edges()[k];
    edges.emplace_back(se.e.u, se.e.v, flip[k] ? -se.sign : se.sign);
  }
  return {SignedGraph::build(g.vertex_count(), edges), std::move(flipped)};
}

}  // namespace boomerang
