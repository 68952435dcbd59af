// Acceptance suite: one PASS/FAIL line per criterion.

#include "smoothed/binopt.hpp"
#include "smoothed/codec.hpp"
#include "smoothed/gaps.hpp"
#include "smoothed/graphs.hpp"
#include "smoothed/harness.hpp"
#include "smoothed/models.hpp"
#include "smoothed/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace smoothed;
using binopt::BinDecisionInstance;
using binopt::Solution;
using binopt::SolutionStructure;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double binomial_se(double p, std::uint64_t m) { return std::sqrt(p * (1 - p) / static_cast<double>(m)); }

// Random coefficient distribution on a W-bit range with dyadic masses.
CoefficientDistribution random_table(unsigned W, std::mt19937_64& rng) {
  const unsigned values = 1u << W;
  std::vector<std::pair<std::uint64_t, Rational>> masses;
  std::vector<unsigned> weights(values);
  unsigned total = 0;
  for (auto& w : weights) {
    w = static_cast<unsigned>(rng() % 4);
    total += w;
  }
  if (total == 0) {
    weights[rng() % values] = 1;
    total = 1;
  }
  for (unsigned v = 0; v < values; ++v)
    if (weights[v]) masses.emplace_back(v, Rational(weights[v], total));
  return CoefficientDistribution::table(W, masses);
}

// ---------------------------------------------------------------------------

Outcome gap_duality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::vector<std::vector<CoefficientDistribution>> configs;
  for (unsigned n : {2u, 3u})
    for (unsigned W : {2u, 3u}) {
      configs.push_back(std::vector<CoefficientDistribution>(n, CoefficientDistribution::uniform_window(W, 0, W)));
      for (int r = 0; r < 3; ++r) {
        std::vector<CoefficientDistribution> cs;
        for (unsigned i = 0; i < n; ++i) cs.push_back(random_table(W, rng));
        configs.push_back(cs);
      }
    }
  std::uint64_t pairs = 0, unequal = 0;
  for (const auto& cs : configs) {
    const unsigned n = static_cast<unsigned>(cs.size());
    std::int64_t tmax = 0;
    for (const auto& c : cs) tmax += static_cast<std::int64_t>(c.max_value());
    std::vector<std::int64_t> ts;
    for (std::int64_t t = 0; t <= tmax; ++t) ts.push_back(t);
    for (const auto& r : gaps::gap_duality_exact(SolutionStructure::all_subsets(n), cs, ts, {1, 2, 3})) {
      ++pairs;
      if (r.lhs != r.rhs) ++unequal;
    }
  }
  const double secs = seconds_since(start);
  return {unequal == 0 && secs < 10.0,
          std::to_string(configs.size()) + " coefficient configurations, " + std::to_string(pairs) +
              " (t, delta) pairs, " + std::to_string(unequal) + " unequal; " + fmt("%.2f s", secs)};
}

Outcome separating_lemma() {
  const auto start = Clock::now();
  bool pass = true;
  std::uint64_t rows = 0, failed = 0;
  double worst_margin = -1e9;
  for (unsigned n : {6u, 10u})
    for (const BigInt rho : {BigInt(1), BigInt(n) * n * n})
      for (auto model : {CoefficientModel::Window, CoefficientModel::Peak}) {
        const auto family = coefficient_family(n, n, rho, 17, model);
        gaps::SeparatingConfig cfg;
        cfg.t = static_cast<std::int64_t>(n) * (std::int64_t{1} << n) / 4;
        cfg.deltas = {1, 2, 4, 8, 16, 32, 64, 128};
        cfg.trials = 10000;
        cfg.seed = 2;
        for (const auto& row : gaps::separating_mc(SolutionStructure::all_subsets(n), family, cfg)) {
          ++rows;
          if (!row.gamma_ok || !row.lambda_ok) {
            ++failed;
            pass = false;
          }
          worst_margin = std::max({worst_margin, row.p_gamma - 3 * row.stderr_gamma - row.bound,
                                   row.p_lambda - 3 * row.stderr_lambda - row.bound});
        }
      }
  const double secs = seconds_since(start);
  return {pass && secs < 300, std::to_string(rows) + " rows (Gamma and Lambda), " + std::to_string(failed) +
                                  " above bound; max(estimate - 3 se - bound) = " + fmt("%.4f; %.1f s", worst_margin, secs)};
}

Outcome claim_b() {
  std::uint64_t checked = 0, exceptions = 0;
  const unsigned n = 3;
  auto run = [&](const SolutionStructure& S, unsigned W) {
    const gaps::RankedStructure ranked(S, gaps::Ranking::Lexicographic);
    std::vector<std::uint64_t> w(n);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * W)); ++code) {
      for (unsigned i = 0; i < n; ++i) w[i] = (code >> (W * (n - 1 - i))) & ((1u << W) - 1);
      const std::int64_t tmax = static_cast<std::int64_t>(n) * ((1 << W) - 1);
      for (std::int64_t t = -1; t <= tmax + 1; ++t) {
        const auto g = gaps::compute_gaps(ranked, w, t);
        if (!g.lambda) continue;
        ++checked;
        if (std::find(g.index_lambdas.begin(), g.index_lambdas.end(), g.lambda) == g.index_lambdas.end()) ++exceptions;
      }
    }
  };
  // Every nonempty S of nonzero vectors, 3-bit coefficients.
  for (std::uint64_t subset = 1; subset < (1u << 7); ++subset) {
    std::vector<Solution> members;
    for (std::uint64_t m = 1; m < 8; ++m)
      if ((subset >> (m - 1)) & 1u) members.push_back(Solution{m});
    run(SolutionStructure::explicit_list(n, members), 3);
  }
  run(SolutionStructure::all_subsets(n), 5);
  return {exceptions == 0, std::to_string(checked) + " draws with a defined loser gap, " + std::to_string(exceptions) +
                               " exceptions"};
}

Outcome solver_correctness() {
  std::mt19937_64 rng(4);
  std::uint64_t agree = 0, total = 0, yes = 0;
  for (int i = 0; i < 10000; ++i) {
    const unsigned n = 2 + static_cast<unsigned>(rng() % 9);
    const unsigned W = 2 + static_cast<unsigned>(rng() % 9);
    SolutionStructure S = SolutionStructure::all_subsets(n);
    switch (i % 3) {
      case 1: S = SolutionStructure::cardinality_exact(n, 1 + static_cast<unsigned>(rng() % n)); break;
      case 2: {
        std::vector<Solution> list;
        for (int j = 0; j < 12; ++j) {
          const Solution x{1 + rng() % ((std::uint64_t{1} << n) - 1)};
          if (std::find(list.begin(), list.end(), x) == list.end()) list.push_back(x);
        }
        S = SolutionStructure::explicit_list(n, list);
        break;
      }
      default: break;
    }
    // Regimes: average case, rho = n^2, rho = 2^(nW/2), worst case.
    const unsigned regime = static_cast<unsigned>((i / 3) % 4);
    const BigInt rho = regime == 0 ? BigInt(1)
                       : regime == 1 ? BigInt(n) * n
                       : regime == 2 ? pow2(n * W / 2)
                                     : pow2(n * W);
    const auto family = coefficient_family(n, W, rho, rng(), i % 2 ? CoefficientModel::Peak : CoefficientModel::Window);
    const auto w = family.decode_coefficients(family.sample(rng()));
    const std::uint64_t t = rng() % (n * (std::uint64_t{1} << W) / 2 + 1);
    const BinDecisionInstance inst{S, W, w, t};
    const auto trace = binopt::adaptive_solve(inst);
    const auto oracle = binopt::brute_force_decide(inst);
    ++total;
    if (trace.answer == oracle.answer && (!trace.answer || (S.contains(*trace.witness) && binopt::cost(w, *trace.witness) <= t)))
      ++agree;
    if (oracle.answer) ++yes;
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(yes) +
                              " yes instances)"};
}

Outcome bit_tail() {
  const unsigned n = 8, W = 8;
  std::uint64_t rows = 0, failed = 0;
  double worst = -1e9;
  for (const BigInt rho : {BigInt(1), BigInt(n) * n})
    for (auto model : {CoefficientModel::Window, CoefficientModel::Peak})
      for (unsigned b0 : {1u, binopt::default_start_bits(n)}) {
        const auto family = coefficient_family(n, W, rho, 5, model);
        const double root = nth_root_up(family.phi().value(), n);
        const std::uint64_t trials = 10000;
        std::vector<unsigned> bits(trials);
        for (std::uint64_t i = 0; i < trials; ++i) {
          const BinDecisionInstance inst{SolutionStructure::all_subsets(n), W,
                                         family.decode_coefficients(family.sample(trial_seed(6, i))),
                                         n * (std::uint64_t{1} << W) / 4};
          bits[i] = binopt::adaptive_solve(inst, b0).bits_revealed;
        }
        for (unsigned b = 1; b < W; ++b) {
          std::uint64_t over = 0;
          for (auto v : bits)
            if (v > b) ++over;
          const double p = static_cast<double>(over) / trials;
          const double bound = to_double_up(Rational(pow2(W - b)) * Rational(root) * Rational(n * n));
          ++rows;
          if (p > bound + 3 * binomial_se(p, trials)) ++failed;
          worst = std::max(worst, p - bound);
        }
      }
  return {failed == 0, std::to_string(rows) + " (rho, model, b0, b) rows, " + std::to_string(failed) +
                           " above bound + 3 se; max(fraction - bound) = " + fmt("%.4f", worst)};
}

Outcome codec_families() {
  std::vector<PerturbationFamily> families;
  std::uint64_t seed = 0;
  for (unsigned n : {2u, 3u, 4u, 6u})
    for (unsigned W : {1u, 2u, 3u, 4u, 6u}) {
      if (n * W > 12) continue;
      for (auto model : {CoefficientModel::Window, CoefficientModel::Peak}) {
        const BigInt rho = seed % 3 == 0 ? BigInt(1) : seed % 3 == 1 ? std::min<BigInt>(BigInt(n) * n, pow2(n * W)) : pow2(n * W);
        families.push_back(coefficient_family(n, W, rho, seed++, model));
      }
    }
  std::mt19937_64 rng(12);
  for (int r = 0; r < 6; ++r) {
    // Explicit tables with skewed dyadic masses and some zero-mass members.
    const unsigned length = 4 + static_cast<unsigned>(rng() % 8);
    std::vector<std::pair<BitString, Rational>> pts;
    std::set<std::uint64_t> used;
    const unsigned count = std::min(2 + static_cast<unsigned>(rng() % 60), 1u << length);
    Rational left = 1;
    for (unsigned i = 0; i < count; ++i) {
      std::uint64_t v;
      do v = rng() % (std::uint64_t{1} << length);
      while (!used.insert(v).second);
      Rational m = i + 1 == count ? left : (i % 5 == 4 ? Rational(0) : left / (2 + rng() % 3));
      left -= m;
      pts.emplace_back(BitString::from_uint(v, length), m);
    }
    std::sort(pts.begin(), pts.end());
    families.push_back(PerturbationFamily::explicit_table(length, pts, Phi::one()));
  }
  for (unsigned v : {4u, 5u})
    for (unsigned e : {1u, 4u}) {
      const auto model = graphs::make_model(graphs::Graph::complete_multipartite(v, 2), Phi{1, e});
      families.push_back(graphs::graph_family(model));
    }
  std::uint64_t points = 0, failures = 0;
  for (const auto& f : families) {
    const auto inj = codec::verify_injective(f, 1u << 12);
    const auto len = codec::verify_lengths(f, 1u << 12);
    const auto st = codec::verify_structure(f, 1u << 12);
    points += inj.checked;
    if (!inj.injective || !len.lengths_ok || !st.intervals_disjoint || !st.mass_below_prefix || !st.round_trip)
      ++failures;
  }
  return {failures == 0 && families.size() >= 20,
          std::to_string(families.size()) + " families, " + std::to_string(points) + " support points, " +
              std::to_string(failures) + " failing families"};
}

Outcome schemes() {
  harness::ExperimentConfig cfg;
  cfg.command = "scheme-sim";
  cfg.n = 8;
  cfg.W = 8;
  cfg.rho = "1";
  cfg.eps = "1/3";
  cfg.trials = 10000;
  cfg.seed = 7;
  const auto result = harness::run_campaign(cfg);
  std::ostringstream rates;
  for (const auto& row : result.rows) rates << " delta=" << row[0] << ":" << row[1] << " (budget " << row[3] << ")";
  const bool bounds = result.summary["bound_ok"].get<bool>();
  const std::uint64_t wrong = result.summary["wrong_answers"].get<std::uint64_t>();

  // Round trip: scheme_to_algorithm(make_scheme(A)) against A.
  const auto family = coefficient_family(8, 8, BigInt(1), 0);
  const scheme::Decider<BinDecisionInstance> algorithm = [](const BinDecisionInstance& inst, StepMeter& meter) {
    return binopt::adaptive_solve(inst, binopt::default_start_bits(inst.n()), meter).answer;
  };
  const auto inverse = scheme::scheme_to_algorithm(
      scheme::make_scheme(algorithm, {3, 8, family.support_space_size(), family.phi().value()}));
  std::uint64_t agree = 0;
  const std::uint64_t round_trips = 1000;
  for (std::uint64_t i = 0; i < round_trips; ++i) {
    // Thresholds spread over the whole range so both answers occur.
    const BinDecisionInstance inst{SolutionStructure::cardinality_exact(8, 4), 8,
                                   family.decode_coefficients(family.sample(trial_seed(8, i))), 4 * i % 1020};
    StepMeter a, b;
    if (inverse(inst, a) == algorithm(inst, b)) ++agree;
  }
  return {bounds && wrong == 0 && agree == round_trips,
          "eps = 1/3;" + rates.str() + "; wrong answers " + std::to_string(wrong) + "; round trip " +
              std::to_string(agree) + "/" + std::to_string(round_trips)};
}

Outcome coloring() {
  std::uint64_t agree = 0;
  const std::uint64_t graphs_checked = 1000;
  for (std::uint64_t i = 0; i < graphs_checked; ++i) {
    const unsigned n = 4 + static_cast<unsigned>(i % 7);
    const double eps = 0.05 * static_cast<double>(1 + i % 10);
    const auto model = graphs::make_model_from_flip(graphs::Graph::complete_multipartite(n, 3), eps);
    const auto g = graphs::perturb(model, trial_seed(9, i));
    if (graphs::color_decide(g, 3).answer == (graphs::chromatic_number(g) <= 3)) ++agree;
  }
  bool bounds = true;
  std::ostringstream detail;
  detail << "oracle agreement " << agree << "/" << graphs_checked << ";";
  for (const char* flip : {"0.2", "0.4", "0.5"}) {
    harness::ExperimentConfig cfg;
    cfg.command = "colorsim";
    cfg.n = 12;
    cfg.k = 3;
    cfg.flip = flip;
    cfg.trials = 10000;
    cfg.seed = 10;
    const auto r = harness::run_campaign(cfg);
    bounds = bounds && r.summary["bound_ok"].get<bool>() && !r.violation;
    detail << " eps=" << flip << ": exhaustive " << r.summary["exhaustive_fraction"].get<double>() << " <= "
           << r.summary["noclique_bound"].get<double>() << ";";
  }
  return {agree == graphs_checked && bounds, detail.str()};
}

Outcome tail_framework() {
  harness::ExperimentConfig cfg;
  cfg.command = "tailcheck";
  cfg.n = 8;
  cfg.W = 8;
  cfg.rho = "1";
  cfg.eps = "1/2";
  cfg.c = 3;
  cfg.trials = 10000;
  cfg.seed = 11;
  const auto tail = harness::run_campaign(cfg);
  bool markov = tail.summary["markov_ok"].get<bool>();
  const bool below = tail.summary["tail_ok"].get<bool>();

  // Markov consistency on every other campaign kind, plus the moment band.
  std::ostringstream band;
  for (unsigned n : {6u, 8u, 10u}) {
    harness::ExperimentConfig s;
    s.command = "solve";
    s.n = n;
    s.W = n;
    s.rho = std::to_string(n * n);
    s.eps = "1/2";
    s.trials = 2000;
    s.seed = 12;
    const auto r = harness::run_campaign(s);
    markov = markov && r.summary["markov_ok"].get<bool>();
    band << " n=" << n << " ratio " << r.summary["moment"]["ratio"].get<double>();
  }
  harness::ExperimentConfig c;
  c.command = "colorsim";
  c.n = 12;
  c.flip = "0.3";
  c.trials = 2000;
  const auto cr = harness::run_campaign(c);
  markov = markov && cr.summary["markov_ok"].get<bool>();
  harness::ExperimentConfig ct = c;
  ct.command = "tailcheck";
  ct.inner = "color";
  markov = markov && harness::run_campaign(ct).summary["markov_ok"].get<bool>();
  return {below && markov, std::to_string(tail.rows.size()) + " tail grid points below bound: " +
                               (below ? "yes" : "no") + "; Markov consistency on all campaigns: " +
                               (markov ? "yes" : "no") + "; moment ratio mean/(n N phi):" + band.str()};
}

Outcome reproducibility() {
  std::vector<harness::ExperimentConfig> configs;
  auto base = [](const char* command) {
    harness::ExperimentConfig cfg;
    cfg.command = command;
    cfg.n = 8;
    cfg.W = 8;
    cfg.trials = 1000;
    cfg.seed = 13;
    return cfg;
  };
  configs.push_back(base("solve"));
  configs.push_back(base("gapsim"));
  auto color = base("colorsim");
  color.n = 10;
  color.flip = "0.3";
  configs.push_back(color);
  auto sch = base("scheme-sim");
  sch.eps = "1/3";
  configs.push_back(sch);
  auto sch_color = color;
  sch_color.command = "scheme-sim";
  sch_color.inner = "color";
  sch_color.eps = "1/2";
  configs.push_back(sch_color);
  configs.push_back(base("tailcheck"));
  std::uint64_t identical = 0;
  for (auto cfg : configs) {
    std::string bodies[3];
    const unsigned threads[3] = {1, 4, 1};
    for (int run = 0; run < 3; ++run) {
      cfg.threads = threads[run];
      std::ostringstream out;
      harness::write_csv(out, cfg, harness::run_campaign(cfg));
      bodies[run] = out.str();
    }
    if (bodies[0] == bodies[1] && bodies[0] == bodies[2] && !bodies[0].empty()) ++identical;
  }
  return {identical == configs.size(), std::to_string(identical) + "/" + std::to_string(configs.size()) +
                                          " campaigns byte-identical across reruns with 1 and 4 threads"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gap duality, exact", gap_duality},
      {"separating bound, Monte Carlo", separating_lemma},
      {"loser gap among index gaps", claim_b},
      {"adaptive solver vs brute force", solver_correctness},
      {"bit-revelation tail", bit_tail},
      {"codec injectivity, lengths, intervals", codec_families},
      {"heuristic schemes", schemes},
      {"coloring", coloring},
      {"tail and moment framework", tail_framework},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
