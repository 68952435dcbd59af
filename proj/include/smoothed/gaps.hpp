#pragma once

// Winner and loser gaps of a single linear constraint w^T x <= t over an
// enumerable solution structure, and the probability checks built on them.

#include "smoothed/binopt.hpp"
#include "smoothed/family.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace smoothed::gaps {

using binopt::Solution;
using binopt::SolutionStructure;

enum class Ranking {
  /// x ranked above y iff x > y as binary numbers (monotone).
  Lexicographic,
  /// Rank key (x * 0x9E3779B97F4A7C15) mod 2^n, a bijection that is not monotone.
  Scrambled,
};

Ranking parse_ranking(const std::string& name);
const char* to_string(Ranking ranking);

std::uint64_t rank_key(const Solution& x, unsigned n, Ranking ranking);

struct GapReport {
  std::optional<Solution> winner;
  std::optional<Solution> loser;
  std::optional<std::int64_t> gamma;   // t - w^T winner
  std::optional<std::int64_t> lambda;  // w^T loser - t
  std::vector<std::optional<std::int64_t>> index_lambdas;
  std::vector<Solution> pareto_set;  // highest rank first
};

/// Solutions of S together with their rank keys, reusable across draws.
class RankedStructure {
 public:
  RankedStructure(const SolutionStructure& structure, Ranking ranking);

  unsigned n() const { return n_; }
  Ranking ranking() const { return ranking_; }
  /// Members sorted by decreasing rank.
  const std::vector<Solution>& members() const { return members_; }

 private:
  unsigned n_;
  Ranking ranking_;
  std::vector<Solution> members_;
};

/// Winner, loser, and Pareto set for coefficients w at threshold t. Rejects
/// structures containing the zero vector.
GapReport compute_gaps(const RankedStructure& structure, const std::vector<std::uint64_t>& w, std::int64_t t,
                       bool with_index_gaps = true);
GapReport compute_gaps(const binopt::BinDecisionInstance& instance, Ranking ranking = Ranking::Lexicographic);

/// Lambda_i for every coordinate i: the loser restricted to S_i against the
/// winner of S without i.
std::vector<std::optional<std::int64_t>> compute_index_gaps(const RankedStructure& structure,
                                                            const std::vector<std::uint64_t>& w, std::int64_t t);
std::vector<std::optional<std::int64_t>> compute_index_gaps(const binopt::BinDecisionInstance& instance,
                                                            Ranking ranking = Ranking::Lexicographic);

/// Events used by the probability statements: Gamma(t) < delta and
/// Lambda(t) <= delta, with an undefined gap never satisfying the event.
bool winner_gap_below(const GapReport& report, std::int64_t delta);
bool loser_gap_at_most(const GapReport& report, std::int64_t delta);

struct DualityResult {
  std::int64_t t;
  std::int64_t delta;
  Rational lhs;  // Pr(Gamma(t) < delta)
  Rational rhs;  // Pr(Lambda(t - delta) <= delta)
};

constexpr std::uint64_t kExhaustiveCoefficientLimit = std::uint64_t{1} << 20;

/// Both sides of the winner/loser duality by exhaustive enumeration of the
/// coefficient space with exact probabilities, for every (t, delta) pair.
std::vector<DualityResult> gap_duality_exact(const SolutionStructure& structure,
                                             const std::vector<CoefficientDistribution>& coefficients,
                                             const std::vector<std::int64_t>& thresholds,
                                             const std::vector<std::int64_t>& deltas,
                                             Ranking ranking = Ranking::Lexicographic);
DualityResult gap_duality_exact(const SolutionStructure& structure,
                                const std::vector<CoefficientDistribution>& coefficients, std::int64_t t,
                                std::int64_t delta, Ranking ranking = Ranking::Lexicographic);

/// Calls visit(w, probability) for every coefficient vector with positive
/// probability; refuses spaces larger than `limit`.
template <class Visit>
void for_each_coefficient_vector(const std::vector<CoefficientDistribution>& coefficients, Visit&& visit,
                                 std::uint64_t limit = kExhaustiveCoefficientLimit);

struct SeparatingRow {
  std::int64_t delta;
  double p_gamma;
  double p_lambda;
  double stderr_gamma;
  double stderr_lambda;
  double bound;  // delta * phi^(1/n) * n (n^2 for non-monotone rankings), rounded up
  std::uint64_t trials;
  bool gamma_ok;
  bool lambda_ok;
};

struct SeparatingConfig {
  std::int64_t t = 0;
  std::vector<std::int64_t> deltas;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Ranking ranking = Ranking::Lexicographic;
  unsigned threads = 1;
};

/// Monte Carlo estimates of Pr(Gamma(t) < delta) and Pr(Lambda(t) <= delta)
/// with coefficients drawn from `family`, checked against the separating
/// bound with a three-standard-error allowance.
std::vector<SeparatingRow> separating_mc(const SolutionStructure& structure, const PerturbationFamily& family,
                                         const SeparatingConfig& config);

/// delta * phi^(1/n) * multiplier as a double rounded up.
double separating_bound(const Phi& phi, unsigned n, std::int64_t delta, unsigned multiplier);

struct DensityCheck {
  Rational probability;  // Pr(a in [z, z + delta))
  double bound;          // phi^(1/n) * delta, rounded up
  bool ok;               // exact: probability^n <= phi * delta^n
};

DensityCheck bounded_density_check(const CoefficientDistribution& dist, unsigned n, const Phi& phi, std::uint64_t z,
                                   std::uint64_t delta);

// ---------------------------------------------------------------------------

template <class Visit>
void for_each_coefficient_vector(const std::vector<CoefficientDistribution>& coefficients, Visit&& visit,
                                 std::uint64_t limit) {
  BigInt space = 1;
  for (const auto& c : coefficients) space *= c.support_size();
  if (space > limit) throw PreconditionError("coefficient space of " + space.str() + " vectors exceeds the limit");
  std::vector<std::vector<std::uint64_t>> axes;
  for (const auto& c : coefficients) axes.push_back(c.support());
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<std::uint64_t> w(axes.size());
  while (true) {
    Rational p = 1;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      w[i] = axes[i][idx[i]];
      p *= coefficients[i].mass(w[i]);
    }
    visit(static_cast<const std::vector<std::uint64_t>&>(w), static_cast<const Rational&>(p));
    std::size_t pos = axes.size();
    while (true) {
      if (pos == 0) return;
      --pos;
      if (++idx[pos] < axes[pos].size()) break;
      idx[pos] = 0;
    }
  }
}

}  // namespace smoothed::gaps
