#include "smoothed/binopt.hpp"
#include "smoothed/models.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace smoothed;
using namespace smoothed::binopt;

namespace {

Solution sol(const char* s) { return parse_solution(s); }

// Lexicographically maximal feasible vector by scanning every mask from
// the top; independent of SolutionStructure::enumerate.
std::optional<Solution> scan_oracle(const SolutionStructure& S, const std::vector<std::uint64_t>& v, std::uint64_t s) {
  const unsigned n = S.n();
  for (std::uint64_t m = (std::uint64_t{1} << n); m-- > 0;) {
    std::uint64_t c = 0;
    for (unsigned i = 0; i < n; ++i)
      if ((m >> (n - 1 - i)) & 1u) c += v[i];
    if (S.contains(Solution{m}) && c <= s) return Solution{m};
  }
  return std::nullopt;
}

std::optional<Solution> dp(const SolutionStructure& S, const std::vector<std::uint64_t>& v, std::uint64_t s) {
  StepMeter meter;
  return dp_solve(S, v, s, meter);
}

SolutionStructure random_structure(unsigned n, std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return SolutionStructure::all_subsets(n);
    case 1: return SolutionStructure::cardinality_exact(n, 1 + static_cast<unsigned>(rng() % n));
    default: {
      std::vector<Solution> list;
      const std::uint64_t count = 1 + rng() % 12;
      for (std::uint64_t i = 0; i < count; ++i) {
        const Solution x{1 + rng() % ((std::uint64_t{1} << n) - 1)};
        if (std::find(list.begin(), list.end(), x) == list.end()) list.push_back(x);
      }
      return SolutionStructure::explicit_list(n, list);
    }
  }
}

}  // namespace

TEST(Truncate, Examples) {
  EXPECT_EQ(truncate(11, 2, 4), 8u);
  EXPECT_EQ(truncate(11, 4, 4), 11u);
  EXPECT_EQ(truncate(11, 0, 4), 0u);
  EXPECT_THROW(truncate(11, 5, 4), PreconditionError);
}

TEST(Truncate, MonotoneAndErrorBounded) {
  const unsigned W = 7;
  for (unsigned b = 0; b <= W; ++b) {
    std::uint64_t prev = 0;
    for (std::uint64_t a = 0; a < (1u << W); ++a) {
      const std::uint64_t t = truncate(a, b, W);
      EXPECT_GE(t, prev);
      EXPECT_LE(t, a);
      EXPECT_LT(a - t, std::uint64_t{1} << (W - b));
      prev = t;
    }
  }
}

TEST(Truncate, CostErrorAtMostNTimesCell) {
  std::mt19937_64 rng(5);
  const unsigned n = 6, W = 10;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> w(n);
    for (auto& a : w) a = rng() % (1u << W);
    const unsigned b = static_cast<unsigned>(rng() % (W + 1));
    std::vector<std::uint64_t> tw(n);
    for (unsigned j = 0; j < n; ++j) tw[j] = truncate(w[j], b, W);
    for (std::uint64_t m = 0; m < (1u << n); ++m) {
      const std::uint64_t diff = cost(w, Solution{m}) - cost(tw, Solution{m});
      EXPECT_LE(cost(tw, Solution{m}), cost(w, Solution{m}));
      EXPECT_LE(diff, (std::uint64_t{1} << (W - b)) * n);
    }
  }
}

TEST(DpSolve, Examples) {
  EXPECT_EQ(dp(SolutionStructure::all_subsets(2), {2, 3}, 4), sol("10"));
  EXPECT_EQ(dp(SolutionStructure::all_subsets(3), {2, 3, 4}, 9), sol("111"));
  EXPECT_EQ(dp(SolutionStructure::all_subsets(3), {2, 3, 4}, 100), sol("111"));
  EXPECT_EQ(dp(SolutionStructure::cardinality_exact(3, 1), {5, 3, 4}, 3), sol("010"));
  EXPECT_EQ(dp(SolutionStructure::all_subsets(2), {2, 3}, 1), std::nullopt);
}

TEST(DpSolve, ZeroVectorExcluded) {
  // Zero coefficients: the zero vector would be feasible, nonzero ones too.
  EXPECT_EQ(dp(SolutionStructure::all_subsets(3), {0, 5, 5}, 0), sol("100"));
  EXPECT_EQ(dp(SolutionStructure::all_subsets(2), {1, 1}, 0), std::nullopt);
}

TEST(DpSolve, LexMaxMatchesScanOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 3000; ++trial) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 8);
    const auto S = random_structure(n, rng);
    std::vector<std::uint64_t> v(n);
    for (auto& a : v) a = rng() % 20;
    const std::uint64_t s = rng() % 60;
    ASSERT_EQ(dp(S, v, s), scan_oracle(S, v, s)) << S.describe() << " s=" << s;
  }
}

TEST(DpSolve, StepsChargedPerCell) {
  StepMeter meter;
  dp_solve(SolutionStructure::all_subsets(3), {1, 1, 1}, 10, meter);
  // cap = min(10, 3) = 3, 4 cells per row, 2 states, n + 1 rows.
  EXPECT_EQ(meter.count(), 4u * 2 * 4);
  StepMeter list_meter;
  dp_solve(SolutionStructure::explicit_list(2, {sol("01"), sol("10")}), {1, 1}, 0, list_meter);
  EXPECT_EQ(list_meter.count(), 2u);
}

TEST(DpSolve, BudgetExhaustionThrows) {
  StepMeter meter(5);
  EXPECT_THROW(dp_solve(SolutionStructure::all_subsets(4), {3, 3, 3, 3}, 12, meter), BudgetExhausted);
}

TEST(AdaptiveSolve, FirstIterationSuccess) {
  const BinDecisionInstance inst{SolutionStructure::all_subsets(2), 4, {1, 2}, 15};
  const auto trace = adaptive_solve(inst, 2);
  EXPECT_TRUE(trace.answer);
  EXPECT_EQ(trace.bits_revealed, 2u);
  EXPECT_EQ(trace.witness, sol("11"));
}

TEST(AdaptiveSolve, RevealsMoreBits) {
  const BinDecisionInstance inst{SolutionStructure::all_subsets(2), 4, {15, 15}, 29};
  const auto trace = adaptive_solve(inst, 1);
  const auto oracle = brute_force_decide(inst);
  EXPECT_GT(trace.bits_revealed, 1u);
  EXPECT_EQ(trace.answer, oracle.answer);
  EXPECT_EQ(trace.witness, oracle.witness);
  EXPECT_EQ(trace.witness, sol("10"));
  EXPECT_LE(cost(inst.w, *trace.witness), inst.threshold);
}

TEST(AdaptiveSolve, DefinitiveNo) {
  const BinDecisionInstance inst{SolutionStructure::cardinality_exact(3, 2), 5, {20, 21, 22}, 30};
  const auto trace = adaptive_solve(inst);
  EXPECT_FALSE(trace.answer);
  EXPECT_FALSE(trace.witness.has_value());
}

TEST(AdaptiveSolve, AverageCaseMatchesOracle) {
  const unsigned n = 8, W = 8;
  const auto family = coefficient_family(n, W, BigInt(1), 0);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto w = family.decode_coefficients(family.sample(trial_seed(42, i)));
    const BinDecisionInstance inst{SolutionStructure::all_subsets(n), W, w, n * (std::uint64_t{1} << W) / 4};
    const auto trace = adaptive_solve(inst);
    const auto oracle = brute_force_decide(inst);
    ASSERT_EQ(trace.answer, oracle.answer) << i;
    if (trace.answer) {
      EXPECT_EQ(trace.witness, oracle.witness);
      EXPECT_TRUE(inst.structure.contains(*trace.witness));
    }
  }
}

TEST(AdaptiveSolve, RandomStructuresMatchOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 10);
    const unsigned W = 1 + static_cast<unsigned>(rng() % 12);
    std::vector<std::uint64_t> w(n);
    for (auto& a : w) a = rng() % (std::uint64_t{1} << W);
    const std::uint64_t t = rng() % (n * (std::uint64_t{1} << W) + 1);
    const BinDecisionInstance inst{random_structure(n, rng), W, w, t};
    const unsigned b0 = 1 + static_cast<unsigned>(rng() % W);
    const auto trace = adaptive_solve(inst, b0);
    const auto oracle = brute_force_decide(inst);
    ASSERT_EQ(trace.answer, oracle.answer);
    if (trace.answer) {
      EXPECT_TRUE(inst.structure.contains(*trace.witness));
      EXPECT_LE(cost(w, *trace.witness), t);
    }
    EXPECT_GE(trace.bits_revealed, std::min(b0, W));
    EXPECT_LE(trace.bits_revealed, W);
  }
}

TEST(AdaptiveSolve, StepsAccumulateAcrossIterations) {
  const BinDecisionInstance inst{SolutionStructure::all_subsets(2), 4, {15, 15}, 29};
  BigInt sum = 0;
  std::vector<std::uint64_t> scaled(2);
  const auto trace = adaptive_solve(inst, 1);
  for (unsigned b = 1; b <= trace.bits_revealed; ++b) {
    StepMeter meter;
    for (unsigned j = 0; j < 2; ++j) scaled[j] = inst.w[j] >> (4 - b);
    dp_solve(inst.structure, scaled, inst.threshold >> (4 - b), meter);
    sum += meter.count() + 2;
  }
  EXPECT_EQ(trace.steps, sum);
}

TEST(BruteForce, Examples) {
  const BinDecisionInstance none{SolutionStructure::cardinality_exact(3, 3), 3, {4, 4, 4}, 11};
  EXPECT_FALSE(brute_force_decide(none).answer);
  const BinDecisionInstance all{SolutionStructure::all_subsets(3), 3, {4, 5, 6}, 15};
  const auto d = brute_force_decide(all);
  EXPECT_TRUE(d.answer);
  EXPECT_EQ(d.witness, sol("111"));
}

TEST(Structure, Enumerate) {
  EXPECT_EQ(SolutionStructure::all_subsets(3).enumerate().size(), 7u);
  EXPECT_EQ(SolutionStructure::cardinality_exact(5, 2).enumerate().size(), 10u);
  const auto list = SolutionStructure::explicit_list(3, {sol("001"), sol("110")});
  EXPECT_TRUE(list.contains(sol("110")));
  EXPECT_FALSE(list.contains(sol("111")));
  EXPECT_EQ(list.members().front(), sol("110"));
}

TEST(Instance, ValidateRejectsWideCoefficients) {
  const BinDecisionInstance bad{SolutionStructure::all_subsets(2), 3, {8, 1}, 3};
  EXPECT_THROW(bad.validate(), PreconditionError);
}
