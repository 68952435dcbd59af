#pragma once

// Binary decision problems "is there an x in S with w^T x <= t" with a
// single perturbed linear constraint.

#include "smoothed/steps.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smoothed::binopt {

/// 0/1 vector of length n stored with x_1 as the most significant of the
/// low n bits, so lexicographic order is integer order.
struct Solution {
  std::uint64_t mask = 0;

  bool get(unsigned n, unsigned i) const { return ((mask >> (n - 1 - i)) & 1u) != 0; }
  friend auto operator<=>(const Solution&, const Solution&) = default;
};

Solution parse_solution(std::string_view bits);
std::string format_solution(const Solution& x, unsigned n);

constexpr unsigned kMaxVariables = 62;
constexpr unsigned kMaxEnumerableVariables = 24;

class SolutionStructure {
 public:
  enum class Kind { AllSubsets, CardinalityExact, ExplicitList };

  /// Every nonzero vector of {0,1}^n.
  static SolutionStructure all_subsets(unsigned n);
  /// Vectors with exactly k ones.
  static SolutionStructure cardinality_exact(unsigned n, unsigned k);
  static SolutionStructure explicit_list(unsigned n, std::vector<Solution> members);

  Kind kind() const { return kind_; }
  unsigned n() const { return n_; }
  unsigned cardinality() const { return k_; }
  /// ExplicitList members in decreasing lexicographic order.
  const std::vector<Solution>& members() const { return list_; }

  bool contains(const Solution& x) const;
  bool contains_zero() const { return contains(Solution{0}); }
  /// Members in increasing lexicographic order; requires n <= 24 for the
  /// implicit kinds.
  std::vector<Solution> enumerate() const;

  std::string describe() const;

 private:
  SolutionStructure(Kind kind, unsigned n) : kind_(kind), n_(n) {}

  Kind kind_;
  unsigned n_;
  unsigned k_ = 0;
  std::vector<Solution> list_;
};

struct BinDecisionInstance {
  SolutionStructure structure;
  unsigned bit_width;               // W
  std::vector<std::uint64_t> w;     // true coefficients, each < 2^W
  std::uint64_t threshold;          // t

  unsigned n() const { return structure.n(); }
  /// Throws PreconditionError when coefficients or sizes are out of range.
  void validate() const;
};

std::uint64_t cost(const std::vector<std::uint64_t>& w, const Solution& x);

/// Keep the b most significant of W bits: 2^(W-b) * floor(a / 2^(W-b)).
std::uint64_t truncate(std::uint64_t a, unsigned b, unsigned bit_width);

/// Lexicographically maximal x in S with v^T x <= s, by a reachable-sum
/// table over suffixes (O(n * min(s, sum v)) cells per counting state) for
/// the implicit kinds and a linear scan for ExplicitList. Every table cell
/// written and every list item scanned is one step.
std::optional<Solution> dp_solve(const SolutionStructure& structure, const std::vector<std::uint64_t>& v,
                                 std::uint64_t s, StepMeter& meter);

struct SolveTrace {
  bool answer = false;
  std::optional<Solution> witness;
  unsigned bits_revealed = 0;
  BigInt steps;
};

unsigned default_start_bits(unsigned n);

/// Reveals coefficient bits one at a time, solving the scaled truncated
/// problem until its lexicographic maximum survives the true constraint or
/// the truncated problem is infeasible.
SolveTrace adaptive_solve(const BinDecisionInstance& instance, unsigned start_bits, StepMeter& meter);
SolveTrace adaptive_solve(const BinDecisionInstance& instance, unsigned start_bits);
SolveTrace adaptive_solve(const BinDecisionInstance& instance);

struct Decision {
  bool answer = false;
  std::optional<Solution> witness;  // lexicographically maximal feasible
};

Decision brute_force_decide(const BinDecisionInstance& instance);

}  // namespace smoothed::binopt
