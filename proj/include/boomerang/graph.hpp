#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "boomerang/errors.hpp"
#include "boomerang/rng.hpp"

namespace boomerang {

// Undirected edge, stored normalized with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct SignedEdge {
  Edge e;
  int sign = 1;  // +1 or -1
  friend auto operator<=>(const SignedEdge&, const SignedEdge&) = default;
};

// Simple undirected signed graph. Vertices are 0..n-1; the edge list is kept
// sorted ascending by (u, v), which fixes the ordering used by edge sampling
// and file serialization.
class SignedGraph {
 public:
  // Validates and normalizes the raw edge list. Throws Error on self loops,
  // duplicates (in either orientation), out-of-range endpoints, or signs
  // outside {+1, -1}.
  static SignedGraph build(int n, const std::vector<std::tuple<int, int, int>>& edges);

  int vertex_count() const { return n_; }
  const std::vector<SignedEdge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int positive_count() const { return positive_count_; }
  int negative_count() const { return edge_count() - positive_count_; }

  std::optional<int> sign_of(int i, int j) const;
  bool is_complete() const;
  bool is_connected() const;

  // neighbors of v as (other endpoint, sign) pairs, ascending by endpoint
  const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_[v]; }

 private:
  int n_ = 0;
  int positive_count_ = 0;
  std::vector<SignedEdge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

// Partition of the vertex set into the connected components of the positive
// subgraph ("factions"). Blocks are sorted internally and ordered by smallest
// member, so the representation is canonical.
struct FactionPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_index;  // vertex -> block

  int block_count() const { return static_cast<int>(blocks.size()); }
  int block_of(int v) const { return block_index[v]; }
};

FactionPartition positive_components(const SignedGraph& g);

// For complete graphs that satisfy the arrangement property, the faction count
// pins down the classical balance notion: k <= 2 is structural balance, k >= 3
// is clustering balance. Incomplete graphs get `none`.
enum class BalanceClass { structural_m1, structural_m2, clustering, none };

const char* balance_class_name(BalanceClass c);

struct ArrangementReport {
  bool connected = false;
  int k = 0;                           // number of positive components
  bool satisfies_arrangement = false;  // connected, n >= 3, no violating edges
  std::vector<Edge> violating_edges;   // negative edges inside one faction
  BalanceClass balance_class = BalanceClass::none;
};

// k-sign arrangement check: connected, n >= 3, and every negative edge runs
// between distinct positive components.
ArrangementReport classify_arrangement(const SignedGraph& g);

// Complete graph whose vertex set is split into consecutive factions of the
// given sizes; edges inside a faction are positive, all others negative.
// Returns the graph together with its faction partition (which matches
// positive_components by construction).
std::pair<SignedGraph, FactionPartition> generate_complete_clustered(
    const std::vector<int>& faction_sizes);

// Flips the sign of `count` distinct edges chosen uniformly at random.
// Returns the perturbed graph and the flipped edges (sorted ascending).
std::pair<SignedGraph, std::vector<Edge>> perturb_flip_edges(const SignedGraph& g, int count,
                                                             Rng& rng);

}  // namespace boomerang
