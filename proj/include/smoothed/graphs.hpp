#pragma once

// Smoothed extension of G(n,p): every potential edge of an adversarial
// graph is flipped independently with probability eps, where
// (1 - eps)^C(n,2) = phi. The additive variant only inserts edges.

#include "smoothed/bits.hpp"
#include "smoothed/family.hpp"
#include "smoothed/steps.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace smoothed::graphs {

constexpr unsigned kMaxVertices = 64;

class Graph {
 public:
  explicit Graph(unsigned vertices = 0);
  /// Bits are the pairs (0,1), (0,2), ..., (0,n-1), (1,2), ... in order.
  static Graph from_adjacency_string(unsigned vertices, const BitString& bits);
  static Graph complete(unsigned vertices);
  /// Complete k-partite graph with parts assigned round-robin.
  static Graph complete_multipartite(unsigned vertices, unsigned parts);

  unsigned vertices() const { return n_; }
  bool has_edge(unsigned u, unsigned v) const { return ((adj_[u] >> v) & 1u) != 0; }
  void set_edge(unsigned u, unsigned v, bool present);
  void toggle_edge(unsigned u, unsigned v) { set_edge(u, v, !has_edge(u, v)); }
  std::uint64_t neighbors(unsigned u) const { return adj_[u]; }
  unsigned degree(unsigned u) const;
  std::size_t edge_count() const;

  BitString to_adjacency_string() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  unsigned n_;
  std::vector<std::uint64_t> adj_;
};

inline std::size_t pair_count(unsigned vertices) {
  return static_cast<std::size_t>(vertices) * (vertices == 0 ? 0 : vertices - 1) / 2;
}

enum class PerturbationKind { Flip, AddOnly };

struct PerturbedGraphModel {
  Graph base;
  Phi phi;
  Rational flip;  // eps, a multiple of 2^-64 in [0, 1/2]
  PerturbationKind kind = PerturbationKind::Flip;
};

/// eps = 1 - 2^(log2(phi) / C(n,2)) evaluated in 50-digit arithmetic,
/// rounded up to a multiple of 2^-64, clamped to [0, 1/2], and nudged up
/// until (1 - eps)^C(n,2) <= phi holds exactly.
Rational flip_from_phi(const Phi& phi, std::size_t pairs);

/// Model with eps derived from phi.
PerturbedGraphModel make_model(Graph base, Phi phi, PerturbationKind kind = PerturbationKind::Flip);
/// Model with eps given directly (rounded to the nearest multiple of 2^-64);
/// phi is (1 - eps)^C(n,2) rounded up to the grid 2^-(C(n,2) + 16).
PerturbedGraphModel make_model_from_flip(Graph base, double flip, PerturbationKind kind = PerturbationKind::Flip);

/// Deterministic in (model, seed): one 64-bit draw per pair in adjacency
/// order, flipped iff draw < eps * 2^64.
Graph perturb(const PerturbedGraphModel& model, std::uint64_t seed);

/// The flip model as a distribution over adjacency strings.
PerturbationFamily graph_family(const PerturbedGraphModel& model);

/// First clique of the given size among vertex subsets in lexicographic
/// order; one step per subset tested.
std::optional<std::vector<unsigned>> find_clique(const Graph& g, unsigned size, StepMeter& meter);
std::optional<std::vector<unsigned>> find_clique(const Graph& g, unsigned size);

struct ColorDecision {
  bool answer = false;
  bool clique_found = false;
  BigInt steps;
};

/// k-colorability: a (k+1)-clique answers no; otherwise exhaustive
/// backtracking over vertices in decreasing-degree order, one step per
/// search node.
ColorDecision color_decide(const Graph& g, unsigned k, StepMeter& meter);
ColorDecision color_decide(const Graph& g, unsigned k);

/// Upper bound (1 - eps^C(k+1,2))^(n/(k+1)) on Pr(no (k+1)-clique).
double noclique_bound(unsigned n, unsigned k, double flip);

// Independent oracles.

/// Clique existence by recursive neighborhood intersection.
bool has_clique_bitset(const Graph& g, unsigned size);
/// Chromatic number by dynamic programming over vertex subsets (n <= 20).
unsigned chromatic_number(const Graph& g);

}  // namespace smoothed::graphs
