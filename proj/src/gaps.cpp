#include "smoothed/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace smoothed::gaps {

namespace {

using Costs = std::vector<std::int64_t>;

Costs member_costs(const RankedStructure& s, const std::vector<std::uint64_t>& w) {
  if (w.size() != s.n()) throw PreconditionError("coefficient count differs from n");
  Costs costs;
  costs.reserve(s.members().size());
  for (const auto& x : s.members()) costs.push_back(static_cast<std::int64_t>(binopt::cost(w, x)));
  return costs;
}

// Position of the winner (first feasible in rank order) or members.size().
std::size_t winner_position(const Costs& costs, std::int64_t t) {
  for (std::size_t i = 0; i < costs.size(); ++i)
    if (costs[i] <= t) return i;
  return costs.size();
}

// Loser among positions [0, end): minimal cost, earliest (highest rank) on ties.
std::optional<std::size_t> loser_position(const Costs& costs, std::size_t end) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < end; ++i)
    if (!best || costs[i] < costs[*best]) best = i;
  return best;
}

struct GapValues {
  std::optional<std::int64_t> gamma;
  std::optional<std::int64_t> lambda;
};

GapValues gap_values(const Costs& costs, std::int64_t t) {
  GapValues g;
  const std::size_t wpos = winner_position(costs, t);
  if (wpos < costs.size()) g.gamma = t - costs[wpos];
  if (const auto l = loser_position(costs, wpos)) g.lambda = costs[*l] - t;
  return g;
}

std::vector<std::optional<std::int64_t>> index_gaps(const RankedStructure& s, const Costs& costs, std::int64_t t) {
  const unsigned n = s.n();
  const auto& members = s.members();
  std::vector<std::optional<std::int64_t>> out(n);
  for (unsigned i = 0; i < n; ++i) {
    std::size_t wpos = members.size();
    for (std::size_t p = 0; p < members.size(); ++p) {
      if (!members[p].get(n, i) && costs[p] <= t) {
        wpos = p;
        break;
      }
    }
    for (std::size_t p = 0; p < wpos; ++p) {
      if (!members[p].get(n, i)) continue;
      const std::int64_t gap = costs[p] - t;
      if (!out[i] || gap < *out[i]) out[i] = gap;
    }
  }
  return out;
}

double binomial_stderr(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace

Ranking parse_ranking(const std::string& name) {
  if (name == "lex" || name == "lexicographic") return Ranking::Lexicographic;
  if (name == "scrambled") return Ranking::Scrambled;
  throw PreconditionError("unknown ranking '" + name + "'");
}

const char* to_string(Ranking ranking) { return ranking == Ranking::Lexicographic ? "lex" : "scrambled"; }

std::uint64_t rank_key(const Solution& x, unsigned n, Ranking ranking) {
  if (ranking == Ranking::Lexicographic) return x.mask;
  const std::uint64_t mask = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  return (x.mask * 0x9E3779B97F4A7C15ull) & mask;
}

RankedStructure::RankedStructure(const SolutionStructure& structure, Ranking ranking)
    : n_(structure.n()), ranking_(ranking), members_(structure.enumerate()) {
  if (structure.contains_zero()) throw PreconditionError("gap analysis requires the zero vector to be outside S");
  std::sort(members_.begin(), members_.end(), [&](const Solution& a, const Solution& b) {
    return rank_key(a, n_, ranking_) > rank_key(b, n_, ranking_);
  });
}

GapReport compute_gaps(const RankedStructure& structure, const std::vector<std::uint64_t>& w, std::int64_t t,
                       bool with_index_gaps) {
  const Costs costs = member_costs(structure, w);
  const auto& members = structure.members();
  GapReport report;
  const std::size_t wpos = winner_position(costs, t);
  if (wpos < costs.size()) {
    report.winner = members[wpos];
    report.gamma = t - costs[wpos];
  }
  if (const auto l = loser_position(costs, wpos)) {
    report.loser = members[*l];
    report.lambda = costs[*l] - t;
  }
  std::optional<std::int64_t> running_min;
  for (std::size_t p = 0; p < members.size(); ++p) {
    if (!running_min || costs[p] < *running_min) {
      report.pareto_set.push_back(members[p]);
      running_min = costs[p];
    }
  }
  if (with_index_gaps) report.index_lambdas = index_gaps(structure, costs, t);
  return report;
}

GapReport compute_gaps(const binopt::BinDecisionInstance& instance, Ranking ranking) {
  instance.validate();
  return compute_gaps(RankedStructure(instance.structure, ranking), instance.w,
                      static_cast<std::int64_t>(instance.threshold));
}

std::vector<std::optional<std::int64_t>> compute_index_gaps(const RankedStructure& structure,
                                                            const std::vector<std::uint64_t>& w, std::int64_t t) {
  return index_gaps(structure, member_costs(structure, w), t);
}

std::vector<std::optional<std::int64_t>> compute_index_gaps(const binopt::BinDecisionInstance& instance,
                                                            Ranking ranking) {
  instance.validate();
  return compute_index_gaps(RankedStructure(instance.structure, ranking), instance.w,
                            static_cast<std::int64_t>(instance.threshold));
}

bool winner_gap_below(const GapReport& report, std::int64_t delta) { return report.gamma && *report.gamma < delta; }

bool loser_gap_at_most(const GapReport& report, std::int64_t delta) {
  return report.lambda && *report.lambda <= delta;
}

std::vector<DualityResult> gap_duality_exact(const SolutionStructure& structure,
                                             const std::vector<CoefficientDistribution>& coefficients,
                                             const std::vector<std::int64_t>& thresholds,
                                             const std::vector<std::int64_t>& deltas, Ranking ranking) {
  const RankedStructure ranked(structure, ranking);
  if (coefficients.size() != ranked.n()) throw PreconditionError("coefficient count differs from n");
  std::vector<DualityResult> results;
  for (auto t : thresholds)
    for (auto d : deltas) results.push_back({t, d, Rational(0), Rational(0)});
  for_each_coefficient_vector(coefficients, [&](const std::vector<std::uint64_t>& w, const Rational& p) {
    const Costs costs = member_costs(ranked, w);
    for (auto& r : results) {
      const GapValues at_t = gap_values(costs, r.t);
      if (at_t.gamma && *at_t.gamma < r.delta) r.lhs += p;
      const GapValues shifted = gap_values(costs, r.t - r.delta);
      if (shifted.lambda && *shifted.lambda <= r.delta) r.rhs += p;
    }
  });
  return results;
}

DualityResult gap_duality_exact(const SolutionStructure& structure,
                                const std::vector<CoefficientDistribution>& coefficients, std::int64_t t,
                                std::int64_t delta, Ranking ranking) {
  return gap_duality_exact(structure, coefficients, std::vector<std::int64_t>{t}, std::vector<std::int64_t>{delta}, ranking)
      .front();
}

double separating_bound(const Phi& phi, unsigned n, std::int64_t delta, unsigned multiplier) {
  const double root = nth_root_up(phi.value(), n);
  return to_double_up(Rational(root) * Rational(delta) * Rational(multiplier));
}

std::vector<SeparatingRow> separating_mc(const SolutionStructure& structure, const PerturbationFamily& family,
                                         const SeparatingConfig& config) {
  if (family.kind() != FamilyKind::CoefficientProduct) throw PreconditionError("separating_mc needs a coefficient family");
  if (family.n() != structure.n()) throw PreconditionError("family and structure disagree on n");
  if (!mass_bound_check(family).ok)
    throw PreconditionError("per-coefficient mass bound violated; the separating bound does not apply");
  const RankedStructure ranked(structure, config.ranking);
  const std::size_t rows = config.deltas.size();
  const unsigned threads = std::max(1u, config.threads);

  std::vector<std::vector<std::uint64_t>> gamma_hits(threads, std::vector<std::uint64_t>(rows, 0));
  std::vector<std::vector<std::uint64_t>> lambda_hits = gamma_hits;
  auto work = [&](unsigned worker) {
    for (std::uint64_t i = worker; i < config.trials; i += threads) {
      const auto w = family.decode_coefficients(family.sample(trial_seed(config.seed, i)));
      const GapReport g = compute_gaps(ranked, w, config.t, false);
      for (std::size_t r = 0; r < rows; ++r) {
        if (winner_gap_below(g, config.deltas[r])) ++gamma_hits[worker][r];
        if (loser_gap_at_most(g, config.deltas[r])) ++lambda_hits[worker][r];
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work, k);
  work(0);
  for (auto& th : pool) th.join();

  const unsigned multiplier = config.ranking == Ranking::Lexicographic ? structure.n() : structure.n() * structure.n();
  std::vector<SeparatingRow> out;
  for (std::size_t r = 0; r < rows; ++r) {
    std::uint64_t g = 0, l = 0;
    for (unsigned k = 0; k < threads; ++k) {
      g += gamma_hits[k][r];
      l += lambda_hits[k][r];
    }
    SeparatingRow row;
    row.delta = config.deltas[r];
    row.trials = config.trials;
    const double denom = config.trials == 0 ? 1.0 : static_cast<double>(config.trials);
    row.p_gamma = static_cast<double>(g) / denom;
    row.p_lambda = static_cast<double>(l) / denom;
    row.stderr_gamma = binomial_stderr(row.p_gamma, config.trials);
    row.stderr_lambda = binomial_stderr(row.p_lambda, config.trials);
    row.bound = row.delta <= 0 ? 0.0 : separating_bound(family.phi(), structure.n(), row.delta, multiplier);
    row.gamma_ok = row.p_gamma - 3.0 * row.stderr_gamma <= row.bound;
    row.lambda_ok = row.p_lambda - 3.0 * row.stderr_lambda <= row.bound;
    out.push_back(row);
  }
  return out;
}

DensityCheck bounded_density_check(const CoefficientDistribution& dist, unsigned n, const Phi& phi, std::uint64_t z,
                                   std::uint64_t delta) {
  DensityCheck check;
  if (delta == 0) {
    check.probability = 0;
  } else {
    const std::uint64_t last = z + (delta - 1);
    check.probability = dist.cdf(last < z ? ~std::uint64_t{0} : last) - dist.cdf_below(z);
  }
  check.ok = pow(check.probability, n) <= phi.value() * pow(Rational(BigInt(delta)), n);
  check.bound = delta == 0 ? 0.0 : to_double_up(Rational(nth_root_up(phi.value(), n)) * Rational(BigInt(delta)));
  return check;
}

}  // namespace smoothed::gaps
