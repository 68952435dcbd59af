#include "smoothed/harness.hpp"

#include "smoothed/codec.hpp"
#include "smoothed/gaps.hpp"
#include "smoothed/graphs.hpp"
#include "smoothed/models.hpp"
#include "smoothed/scheme.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace smoothed::harness {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double binomial_se(double p, std::uint64_t m) { return m == 0 ? 0.0 : std::sqrt(p * (1 - p) / static_cast<double>(m)); }

// Runs body(i) for i in [0, count) over `threads` workers with a static
// interleaved split. Results must be written to per-index slots.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body body) {
  threads = std::max(1u, threads);
  std::exception_ptr error;
  std::mutex error_lock;
  auto work = [&](unsigned worker) {
    try {
      for (std::uint64_t i = worker; i < count; i += threads) body(i);
    } catch (...) {
      std::lock_guard<std::mutex> guard(error_lock);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

BigInt parse_bigint(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("not a nonnegative integer: '" + text + "'");
  return BigInt(text);
}

Rational eps_of(const ExperimentConfig& cfg) { return parse_rational(cfg.eps); }

std::vector<BigInt> steps_of(const std::vector<TrialRecord>& records) {
  std::vector<BigInt> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.steps);
  return out;
}

json moment_json(const MomentEstimate& m) {
  return {{"mean", m.mean}, {"stderr", m.std_error}, {"bound", m.bound}, {"ratio", m.ratio}};
}

// Moment estimate and Markov consistency shared by every per-trial campaign.
void attach_step_summary(CampaignResult& result, const ExperimentConfig& cfg, unsigned n, const Rational& nphi) {
  if (result.records.empty()) {
    result.summary["no_data"] = true;
    return;
  }
  const auto steps = steps_of(result.records);
  const Rational eps = eps_of(cfg);
  result.summary["moment"] = moment_json(moment_estimate(steps, eps, n, nphi));
  const bool markov = markov_consistent(tail_curve(steps, eps, n, cfg.c, nphi));
  result.summary["markov_ok"] = markov;
  if (!markov) result.violation = true;
}

// ---------------------------------------------------------------------------
// Knapsack-type campaigns

struct SolveSetup {
  binopt::SolutionStructure structure;
  PerturbationFamily family;
  unsigned W;
  std::int64_t t;
  unsigned start_bits;
};

SolveSetup solve_setup(const ExperimentConfig& cfg) {
  const unsigned W = cfg.bit_width();
  return {parse_structure(cfg.structure, cfg.n),
          coefficient_family(cfg.n, W, parse_bigint(cfg.rho), cfg.adversary_seed,
                             parse_coefficient_model(cfg.model)),
          W, cfg.threshold(), cfg.start_bits == 0 ? binopt::default_start_bits(cfg.n) : cfg.start_bits};
}

binopt::BinDecisionInstance solve_instance(const SolveSetup& s, std::uint64_t seed) {
  return {s.structure, s.W, s.family.decode_coefficients(s.family.sample(seed)), static_cast<std::uint64_t>(s.t)};
}

constexpr unsigned kOracleLimit = 20;

std::vector<TrialRecord> solve_records(const ExperimentConfig& cfg, const SolveSetup& s) {
  std::vector<TrialRecord> records(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t i) {
    TrialRecord& r = records[i];
    r.index = i;
    r.seed = trial_seed(cfg.seed, i);
    const auto inst = solve_instance(s, r.seed);
    const auto trace = binopt::adaptive_solve(inst, s.start_bits);
    r.steps = trace.steps;
    r.outcome = trace.answer ? "yes" : "no";
    r.bits_revealed = trace.bits_revealed;
    if (cfg.n <= kOracleLimit) r.verified = binopt::brute_force_decide(inst).answer == trace.answer;
  });
  return records;
}

CampaignResult solve_campaign(const ExperimentConfig& cfg) {
  const SolveSetup s = solve_setup(cfg);
  CampaignResult result;
  result.records = solve_records(cfg, s);
  result.columns = {"trial", "seed", "answer", "bits_revealed", "steps"};
  std::uint64_t mismatches = 0, yes = 0;
  for (const auto& r : result.records) {
    result.rows.push_back({std::to_string(r.index), std::to_string(r.seed), r.outcome == "yes" ? "1" : "0",
                           std::to_string(r.bits_revealed), r.steps.str()});
    if (!r.verified) ++mismatches;
    if (r.outcome == "yes") ++yes;
  }
  const std::uint64_t m = result.records.size();
  result.summary = {{"command", "solve"},
                    {"trials", m},
                    {"threshold", s.t},
                    {"start_bits", s.start_bits},
                    {"oracle_checked", cfg.n <= kOracleLimit},
                    {"mismatches", mismatches},
                    {"yes_fraction", m ? static_cast<double>(yes) / m : 0.0}};
  if (mismatches) result.violation = true;

  // Fraction of trials revealing more than b bits against 2^(W-b) phi^(1/n) n^2.
  if (m) {
    json tail = json::array();
    const double root = nth_root_up(s.family.phi().value(), cfg.n);
    bool ok = true;
    for (unsigned b = 1; b < s.W; ++b) {
      std::uint64_t over = 0;
      for (const auto& r : result.records)
        if (r.bits_revealed > b) ++over;
      const double p = static_cast<double>(over) / m;
      const double se = binomial_se(p, m);
      const double bound =
          to_double_up(Rational(pow2(s.W - b)) * Rational(root) * Rational(BigInt(cfg.n) * cfg.n));
      const bool row_ok = p - 3 * se <= bound;
      ok = ok && row_ok;
      tail.push_back({{"b", b}, {"fraction", p}, {"stderr", se}, {"bound", bound}, {"ok", row_ok}});
    }
    result.summary["bits_tail"] = tail;
    result.summary["bits_tail_ok"] = ok;
    if (!ok) result.violation = true;
  }
  attach_step_summary(result, cfg, cfg.n, s.family.support_space_size() * s.family.phi().value());
  return result;
}

std::vector<std::int64_t> default_delta_grid() { return {1, 2, 4, 8, 16, 32, 64, 128}; }

CampaignResult gap_campaign(const ExperimentConfig& cfg) {
  const SolveSetup s = solve_setup(cfg);
  gaps::SeparatingConfig sc;
  sc.t = s.t;
  sc.deltas = cfg.delta_grid.empty() ? default_delta_grid() : parse_int_grid(cfg.delta_grid);
  sc.trials = cfg.trials;
  sc.seed = cfg.seed;
  sc.ranking = gaps::parse_ranking(cfg.ranking);
  sc.threads = cfg.threads;
  CampaignResult result;
  result.columns = {"delta", "p_gamma_emp", "p_lambda_emp", "stderr", "bound", "trials"};
  json rows = json::array();
  bool ok = true;
  for (const auto& row : gaps::separating_mc(s.structure, s.family, sc)) {
    result.rows.push_back({std::to_string(row.delta), fmt(row.p_gamma), fmt(row.p_lambda),
                           fmt(std::max(row.stderr_gamma, row.stderr_lambda)), fmt(row.bound),
                           std::to_string(row.trials)});
    ok = ok && row.gamma_ok && row.lambda_ok;
    rows.push_back({{"delta", row.delta},
                    {"gamma_ok", row.gamma_ok},
                    {"lambda_ok", row.lambda_ok},
                    {"stderr_gamma", row.stderr_gamma},
                    {"stderr_lambda", row.stderr_lambda}});
  }
  result.summary = {{"command", "gapsim"}, {"trials", cfg.trials}, {"threshold", s.t}, {"rows", rows}, {"ok", ok}};
  if (cfg.trials == 0) result.summary["no_data"] = true;
  if (!ok) result.violation = true;
  return result;
}

// ---------------------------------------------------------------------------
// Coloring campaigns

graphs::PerturbedGraphModel color_model(const ExperimentConfig& cfg) {
  graphs::Graph base(cfg.n);
  if (cfg.base == "multipartite") base = graphs::Graph::complete_multipartite(cfg.n, cfg.k);
  else if (cfg.base == "complete") base = graphs::Graph::complete(cfg.n);
  if (cfg.phi_exp) return graphs::make_model(base, Phi{BigInt(1), *cfg.phi_exp});
  return graphs::make_model_from_flip(base, to_double(parse_rational(cfg.flip.empty() ? "0" : cfg.flip)));
}

constexpr unsigned kChromaticOracleLimit = 10;

std::vector<TrialRecord> color_records(const ExperimentConfig& cfg, const graphs::PerturbedGraphModel& model) {
  std::vector<TrialRecord> records(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t i) {
    TrialRecord& r = records[i];
    r.index = i;
    r.seed = trial_seed(cfg.seed, i);
    const auto g = graphs::perturb(model, r.seed);
    const auto d = graphs::color_decide(g, cfg.k);
    r.steps = d.steps;
    r.outcome = d.answer ? "yes" : "no";
    r.clique_found = d.clique_found;
    if (cfg.n <= kChromaticOracleLimit) r.verified = (graphs::chromatic_number(g) <= cfg.k) == d.answer;
  });
  return records;
}

Rational graph_support_times_phi(const graphs::PerturbedGraphModel& model) {
  return Rational(pow2(static_cast<unsigned>(graphs::pair_count(model.base.vertices())))) * model.phi.value();
}

CampaignResult color_campaign(const ExperimentConfig& cfg) {
  const auto model = color_model(cfg);
  CampaignResult result;
  result.records = color_records(cfg, model);
  result.columns = {"trial", "seed", "clique_found", "answer", "steps"};
  std::uint64_t mismatches = 0, exhaustive = 0;
  for (const auto& r : result.records) {
    result.rows.push_back({std::to_string(r.index), std::to_string(r.seed), r.clique_found ? "1" : "0",
                           r.outcome == "yes" ? "1" : "0", r.steps.str()});
    if (!r.verified) ++mismatches;
    if (!r.clique_found) ++exhaustive;
  }
  const std::uint64_t m = result.records.size();
  const double eps = to_double(model.flip);
  const double p = m ? static_cast<double>(exhaustive) / m : 0.0;
  const double se = binomial_se(p, m);
  const double bound = graphs::noclique_bound(cfg.n, cfg.k, eps);
  // The no-clique bound is only asserted in the regime eps >= 0.1.
  const bool asserted = eps >= 0.1 && m > 0;
  const bool ok = !asserted || p <= bound + 3 * se;
  result.summary = {{"command", "colorsim"},
                    {"trials", m},
                    {"flip", eps},
                    {"phi", to_double(model.phi.value())},
                    {"oracle_checked", cfg.n <= kChromaticOracleLimit},
                    {"mismatches", mismatches},
                    {"exhaustive_fraction", p},
                    {"stderr", se},
                    {"noclique_bound", bound},
                    {"bound_asserted", asserted},
                    {"bound_ok", ok}};
  if (mismatches || !ok) result.violation = true;
  attach_step_summary(result, cfg, cfg.n, graph_support_times_phi(model));
  return result;
}

// ---------------------------------------------------------------------------
// Schemes

unsigned exponent_inverse(const ExperimentConfig& cfg) {
  const Rational eps = eps_of(cfg);
  if (numerator(eps) != 1) throw ConfigError({"eps (schemes need eps = 1/m)"});
  return denominator(eps).convert_to<unsigned>();
}

struct SchemeTrial {
  bool truth = false;
  BigInt steps;
  std::vector<scheme::Verdict> verdicts;
};

template <class Input>
CampaignResult scheme_campaign_for(const ExperimentConfig& cfg, const scheme::Decider<Input>& algorithm,
                                   const scheme::SchemeParameters& params,
                                   const std::function<Input(std::uint64_t)>& make_input) {
  const auto deltas = cfg.delta_grid.empty() ? parse_rational_grid("1/2,1/4,1/8") : parse_rational_grid(cfg.delta_grid);
  const auto s = scheme::make_scheme(algorithm, params);
  std::vector<SchemeTrial> trials(cfg.trials);
  CampaignResult result;
  result.records.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t i) {
    const std::uint64_t seed = trial_seed(cfg.seed, i);
    const Input input = make_input(seed);
    StepMeter meter;
    SchemeTrial& tr = trials[i];
    tr.truth = algorithm(input, meter);
    tr.steps = meter.count();
    bool errorless = true;
    for (const auto& d : deltas) {
      const auto out = s(input, d);
      tr.verdicts.push_back(out.result);
      if (out.result != scheme::Verdict::Bottom && (out.result == scheme::Verdict::Accept) != tr.truth)
        errorless = false;
    }
    TrialRecord& r = result.records[i];
    r.index = i;
    r.seed = seed;
    r.steps = tr.steps;
    r.outcome = tr.truth ? "yes" : "no";
    r.verified = errorless;
  });

  result.columns = {"delta", "bottom_rate", "stderr", "budget"};
  json rows = json::array();
  bool bound_ok = true;
  std::uint64_t wrong = 0;
  for (const auto& r : result.records)
    if (!r.verified) ++wrong;
  const std::uint64_t m = cfg.trials;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    std::uint64_t bottoms = 0;
    for (const auto& tr : trials)
      if (tr.verdicts[j] == scheme::Verdict::Bottom) ++bottoms;
    const double p = m ? static_cast<double>(bottoms) / m : 0.0;
    const double se = binomial_se(p, m);
    const BigInt budget = scheme::scheme_budget(params, deltas[j]);
    const bool ok = p <= to_double(deltas[j]) + 3 * se;
    bound_ok = bound_ok && ok;
    result.rows.push_back({to_string(deltas[j]), fmt(p), fmt(se), budget.str()});
    rows.push_back({{"delta", to_string(deltas[j])}, {"bottom_rate", p}, {"ok", ok}});
  }
  result.summary = {{"command", "scheme-sim"}, {"inner", cfg.inner},         {"trials", m},
                    {"eps", cfg.eps},          {"wrong_answers", wrong},      {"rows", rows},
                    {"bound_ok", bound_ok}};
  if (m == 0) result.summary["no_data"] = true;
  if (wrong || !bound_ok) result.violation = true;
  return result;
}

CampaignResult scheme_campaign(const ExperimentConfig& cfg) {
  const unsigned m = exponent_inverse(cfg);
  if (cfg.inner == "color") {
    const auto model = color_model(cfg);
    const scheme::SchemeParameters params{m, cfg.n, pow2(static_cast<unsigned>(graphs::pair_count(cfg.n))),
                                          model.phi.value()};
    const unsigned k = cfg.k;
    const scheme::Decider<graphs::Graph> algorithm = [k](const graphs::Graph& g, StepMeter& meter) {
      return graphs::color_decide(g, k, meter).answer;
    };
    return scheme_campaign_for<graphs::Graph>(cfg, algorithm, params,
                                              [&](std::uint64_t seed) { return graphs::perturb(model, seed); });
  }
  const SolveSetup s = solve_setup(cfg);
  const scheme::SchemeParameters params{m, cfg.n, s.family.support_space_size(), s.family.phi().value()};
  const unsigned b0 = s.start_bits;
  const scheme::Decider<binopt::BinDecisionInstance> algorithm = [b0](const binopt::BinDecisionInstance& inst,
                                                                      StepMeter& meter) {
    return binopt::adaptive_solve(inst, b0, meter).answer;
  };
  return scheme_campaign_for<binopt::BinDecisionInstance>(cfg, algorithm, params,
                                                          [&](std::uint64_t seed) { return solve_instance(s, seed); });
}

// ---------------------------------------------------------------------------
// Tail check

CampaignResult tail_campaign(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  Rational nphi;
  if (cfg.inner == "color") {
    const auto model = color_model(cfg);
    records = color_records(cfg, model);
    nphi = graph_support_times_phi(model);
  } else {
    const SolveSetup s = solve_setup(cfg);
    records = solve_records(cfg, s);
    nphi = s.family.support_space_size() * s.family.phi().value();
  }
  CampaignResult result;
  result.columns = {"T", "p_emp", "stderr", "bound", "markov"};
  result.summary = {{"command", "tailcheck"}, {"inner", cfg.inner}, {"trials", records.size()}};
  if (records.empty()) {
    result.summary["no_data"] = true;
    result.records = std::move(records);
    return result;
  }
  const auto steps = steps_of(records);
  const Rational eps = eps_of(cfg);
  const auto rows = tail_curve(steps, eps, cfg.n, cfg.c, nphi);
  for (const auto& r : rows)
    result.rows.push_back({fmt(r.threshold), fmt(r.empirical), fmt(r.std_error), fmt(r.bound), fmt(r.markov)});
  const bool below = tail_below_bound(rows);
  const bool markov = markov_consistent(rows);
  std::uint64_t mismatches = 0;
  for (const auto& r : records)
    if (!r.verified) ++mismatches;
  result.summary["tail_ok"] = below;
  result.summary["markov_ok"] = markov;
  result.summary["mismatches"] = mismatches;
  result.summary["moment"] = moment_json(moment_estimate(steps, eps, cfg.n, nphi));
  result.violation = !below || !markov || mismatches > 0;
  result.records = std::move(records);
  return result;
}

CampaignResult codec_campaign(const ExperimentConfig& cfg) {
  std::ifstream in(cfg.family);
  if (!in) throw ConfigError({"family (cannot open '" + cfg.family + "')"});
  const auto family = family_from_json(json::parse(in));
  CampaignResult result;
  result.summary = codec_report(family, cfg.exhaustive, cfg.trials, cfg.seed);
  result.violation = !result.summary["injective"].get<bool>() || !result.summary["lengths_ok"].get<bool>() ||
                     !result.summary.value("round_trip", true) || !result.summary.value("intervals_disjoint", true);
  return result;
}

const std::set<std::string> kCommands = {"solve", "gapsim", "colorsim", "scheme-sim", "tailcheck", "codec-check"};

template <class T>
void read_field(const json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> offenders)
    : std::invalid_argument("invalid configuration: " + join(offenders, "; ")), offenders_(std::move(offenders)) {}

std::int64_t ExperimentConfig::threshold() const {
  if (t) return *t;
  return static_cast<std::int64_t>(n) * (std::int64_t{1} << bit_width()) / 4;
}

json ExperimentConfig::to_json() const {
  json j = {{"command", command},
            {"structure", structure},
            {"n", n},
            {"W", W},
            {"k", k},
            {"rho", rho},
            {"phi_exp", nullptr},
            {"flip", flip},
            {"model", model},
            {"ranking", ranking},
            {"t", nullptr},
            {"start_bits", start_bits},
            {"delta_grid", delta_grid},
            {"trials", trials},
            {"seed", seed},
            {"adversary_seed", adversary_seed},
            {"threads", threads},
            {"out", out},
            {"inner", inner},
            {"eps", eps},
            {"c", c},
            {"base", base},
            {"family", family},
            {"exhaustive", exhaustive}};
  if (phi_exp) j["phi_exp"] = *phi_exp;
  if (t) j["t"] = *t;
  return j;
}

void ExperimentConfig::merge_json(const json& j) {
  if (!j.is_object()) throw ConfigError({"config (expected a JSON object)"});
  static const std::set<std::string> known = {
      "command", "structure", "n",    "W",      "k",     "rho",  "phi_exp", "flip",   "model",
      "ranking", "t",         "start_bits", "delta_grid", "trials", "seed", "adversary_seed", "threads",
      "out",     "inner",     "eps",  "c",      "base",  "family", "exhaustive"};
  std::vector<std::string> unknown;
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) unknown.push_back(key + " (unknown field)");
  if (!unknown.empty()) throw ConfigError(unknown);
  try {
    read_field(j, "command", command);
    read_field(j, "structure", structure);
    read_field(j, "n", n);
    read_field(j, "W", W);
    read_field(j, "k", k);
    if (j.contains("rho")) rho = j["rho"].is_string() ? j["rho"].get<std::string>() : j["rho"].dump();
    if (j.contains("phi_exp")) {
      if (j["phi_exp"].is_null()) phi_exp.reset();
      else phi_exp = j["phi_exp"].get<unsigned>();
    }
    read_field(j, "flip", flip);
    read_field(j, "model", model);
    read_field(j, "ranking", ranking);
    if (j.contains("t")) {
      if (j["t"].is_null()) t.reset();
      else t = j["t"].get<std::int64_t>();
    }
    read_field(j, "start_bits", start_bits);
    read_field(j, "delta_grid", delta_grid);
    read_field(j, "trials", trials);
    read_field(j, "seed", seed);
    read_field(j, "adversary_seed", adversary_seed);
    read_field(j, "threads", threads);
    read_field(j, "out", out);
    read_field(j, "inner", inner);
    read_field(j, "eps", eps);
    read_field(j, "c", c);
    read_field(j, "base", base);
    read_field(j, "family", family);
    read_field(j, "exhaustive", exhaustive);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("config (") + e.what() + ")"});
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("out");
  j.erase("threads");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (!kCommands.count(command)) bad.push_back("command (unknown: '" + command + "')");
  if (threads == 0) bad.push_back("threads (must be at least 1)");
  try {
    const Rational e = parse_rational(eps);
    if (e <= 0 || e > 1) bad.push_back("eps (must lie in (0, 1])");
  } catch (const std::exception&) {
    bad.push_back("eps (not a rational: '" + eps + "')");
  }
  if (command == "codec-check") {
    if (family.empty()) bad.push_back("family (required)");
    if (!bad.empty()) throw ConfigError(bad);
    return;
  }
  const bool coloring = command == "colorsim" || ((command == "scheme-sim" || command == "tailcheck") && inner == "color");
  if (command == "scheme-sim" || command == "tailcheck")
    if (inner != "solve" && inner != "color") bad.push_back("inner (solve or color)");
  if (coloring) {
    if (n < 2 || n > graphs::kMaxVertices) bad.push_back("n (graphs need 2 <= n <= 64)");
    if (k < 1 || k > 62 || k + 1 > n) bad.push_back("k (need 1 <= k and k + 1 <= n)");
    if (base != "multipartite" && base != "complete" && base != "empty")
      bad.push_back("base (multipartite, complete or empty)");
    if (phi_exp) {
      if (*phi_exp > graphs::pair_count(n)) bad.push_back("phi_exp (must not exceed C(n,2))");
    } else if (!flip.empty()) {
      try {
        const Rational f = parse_rational(flip);
        if (f < 0 || f > Rational(1, 2)) bad.push_back("flip (must lie in [0, 1/2])");
      } catch (const std::exception&) {
        bad.push_back("flip (not a rational: '" + flip + "')");
      }
    } else {
      bad.push_back("phi_exp/flip (one of them is required)");
    }
  } else {
    const unsigned width = bit_width();
    if (n < 1 || n > 24) bad.push_back("n (must lie in [1, 24])");
    if (width < 1 || width > 24) bad.push_back("W (must lie in [1, 24])");
    try {
      if (n >= 1 && n <= 24) parse_structure(structure, n);
    } catch (const std::exception& e) {
      bad.push_back("structure (" + std::string(e.what()) + ")");
    }
    try {
      const BigInt r = parse_bigint(rho);
      if (r < 1 || (n <= 24 && width <= 24 && r > pow2(n * width))) bad.push_back("rho (must lie in [1, 2^(n W)])");
    } catch (const std::exception&) {
      bad.push_back("rho (not an integer: '" + rho + "')");
    }
    try {
      parse_coefficient_model(model);
    } catch (const std::exception&) {
      bad.push_back("model (window or peak)");
    }
    try {
      gaps::parse_ranking(ranking);
    } catch (const std::exception&) {
      bad.push_back("ranking (lex or scrambled)");
    }
    if (t && *t < 0 && command != "gapsim") bad.push_back("t (must be nonnegative)");
    if (start_bits > width) bad.push_back("start_bits (must not exceed W)");
  }
  if (!delta_grid.empty()) {
    try {
      if (command == "scheme-sim") {
        for (const auto& d : parse_rational_grid(delta_grid))
          if (d <= 0 || d >= 1) throw std::invalid_argument("delta outside (0, 1)");
      } else {
        parse_int_grid(delta_grid);
      }
    } catch (const std::exception& e) {
      bad.push_back("delta_grid (" + std::string(e.what()) + ")");
    }
  }
  if (command == "scheme-sim") {
    try {
      if (numerator(parse_rational(eps)) != 1) bad.push_back("eps (schemes need eps = 1/m)");
    } catch (const std::exception&) {
    }
  }
  if (!bad.empty()) throw ConfigError(bad);
}

binopt::SolutionStructure parse_structure(const std::string& spec, unsigned n) {
  if (spec == "subsets") return binopt::SolutionStructure::all_subsets(n);
  if (spec.rfind("card:", 0) == 0) {
    const unsigned k = static_cast<unsigned>(std::stoul(spec.substr(5)));
    return binopt::SolutionStructure::cardinality_exact(n, k);
  }
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("expected subsets, card:k or a readable file, got '" + spec + "'");
  std::vector<binopt::Solution> members;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.size() != n) throw std::invalid_argument("vector '" + line + "' does not have n entries");
    members.push_back(binopt::parse_solution(line));
  }
  return binopt::SolutionStructure::explicit_list(n, members);
}

CampaignResult run_campaign(const ExperimentConfig& config) {
  config.validate();
  if (config.command == "solve") return solve_campaign(config);
  if (config.command == "gapsim") return gap_campaign(config);
  if (config.command == "colorsim") return color_campaign(config);
  if (config.command == "scheme-sim") return scheme_campaign(config);
  if (config.command == "tailcheck") return tail_campaign(config);
  return codec_campaign(config);
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const CampaignResult& result) {
  const json header = {{"config_hash", config.hash()},
                       {"master_seed", config.seed},
                       {"tool_version", kToolVersion},
                       {"command", config.command}};
  out << "# " << header.dump() << "\n";
  out << join(result.columns, ",") << "\n";
  for (const auto& row : result.rows) out << join(row, ",") << "\n";
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("missing CSV header line");
  table.header = json::parse(line.substr(2));
  if (!std::getline(in, line)) throw std::runtime_error("missing CSV column line");
  table.columns = split(line);
  while (std::getline(in, line))
    if (!line.empty()) table.rows.push_back(split(line));
  return table;
}

double step_power(const BigInt& steps, const Rational& eps) {
  if (steps <= 0) return 0.0;
  const Float50 e = Float50(numerator(eps).str()) / Float50(denominator(eps).str());
  return static_cast<double>(boost::multiprecision::exp(e * boost::multiprecision::log(Float50(steps.str()))));
}

MomentEstimate moment_estimate(const std::vector<BigInt>& steps, const Rational& eps, unsigned n,
                               const Rational& support_times_phi) {
  if (steps.empty()) throw std::invalid_argument("moment_estimate: no records");
  if (eps <= 0) throw std::invalid_argument("moment_estimate: eps must be positive");
  double sum = 0, sq = 0;
  for (const auto& s : steps) {
    const double v = step_power(s, eps);
    sum += v;
    sq += v * v;
  }
  const double m = static_cast<double>(steps.size());
  MomentEstimate est;
  est.mean = sum / m;
  const double var = steps.size() > 1 ? std::max(0.0, (sq - m * est.mean * est.mean) / (m - 1)) : 0.0;
  est.std_error = std::sqrt(var / m);
  est.bound = to_double(Rational(BigInt(n)) * support_times_phi);
  est.ratio = est.bound > 0 ? est.mean / est.bound : 0.0;
  return est;
}

std::vector<TailRow> tail_curve(const std::vector<BigInt>& steps, const Rational& eps, unsigned n, unsigned c,
                                const Rational& support_times_phi) {
  if (steps.empty()) return {};
  if (eps <= 0) throw std::invalid_argument("tail_curve: eps must be positive");
  std::vector<double> values;
  values.reserve(steps.size());
  double mean_pow = 0;
  for (const auto& s : steps) {
    values.push_back(to_double(s));
    mean_pow += step_power(s, eps);
  }
  const double m = static_cast<double>(steps.size());
  mean_pow /= m;
  const double largest = *std::max_element(values.begin(), values.end());
  const double e = to_double(eps);
  const double scale = std::pow(static_cast<double>(n), static_cast<double>(c)) * to_double(support_times_phi);
  std::vector<TailRow> rows;
  for (unsigned j = 0;; ++j) {
    const double T = std::exp2(j / 2.0);
    if (j > 0 && T > 2 * largest) break;
    std::uint64_t hits = 0;
    for (double v : values)
      if (v >= T) ++hits;
    TailRow row;
    row.threshold = T;
    row.empirical = static_cast<double>(hits) / m;
    row.std_error = binomial_se(row.empirical, steps.size());
    const double te = std::pow(T, e);
    row.bound = std::min(1.0, scale / te);
    row.markov = mean_pow / te + 3 * row.std_error;
    rows.push_back(row);
  }
  return rows;
}

bool tail_below_bound(const std::vector<TailRow>& rows) {
  for (const auto& r : rows)
    if (r.empirical > r.bound) return false;
  return true;
}

bool markov_consistent(const std::vector<TailRow>& rows) {
  for (const auto& r : rows)
    if (r.empirical > r.markov * (1 + 1e-12)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Family files

namespace {

Rational rational_field(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(BigInt(v.get<std::int64_t>()));
  throw std::invalid_argument("expected a rational as a string such as \"1/4\"");
}

Phi phi_field(const json& spec, const BigInt& support_size) {
  if (spec.contains("phi")) {
    const json& p = spec.at("phi");
    const BigInt num = p.at("num").is_string() ? BigInt(p.at("num").get<std::string>()) : BigInt(p.at("num").get<std::uint64_t>());
    return {num, p.at("exp").get<unsigned>()};
  }
  if (spec.contains("rho")) {
    const json& r = spec.at("rho");
    const BigInt rho = r.is_string() ? BigInt(r.get<std::string>()) : BigInt(r.get<std::uint64_t>());
    return phi_from_rho({rho}, support_size);
  }
  throw std::invalid_argument("family needs phi or rho");
}

std::optional<unsigned> exponent_bound_field(const json& spec) {
  if (spec.contains("exponent_bound")) return spec.at("exponent_bound").get<unsigned>();
  return std::nullopt;
}

}  // namespace

PerturbationFamily family_from_json(const json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "coefficient_product") {
    const unsigned W = spec.at("W").get<unsigned>();
    if (spec.contains("generate")) {
      const json& g = spec.at("generate");
      const unsigned n = spec.at("n").get<unsigned>();
      const json& r = g.at("rho");
      const BigInt rho = r.is_string() ? BigInt(r.get<std::string>()) : BigInt(r.get<std::uint64_t>());
      return coefficient_family(n, W, rho, g.value("adversary_seed", std::uint64_t{0}),
                                parse_coefficient_model(g.value("model", std::string("window"))));
    }
    std::vector<CoefficientDistribution> cs;
    for (const auto& c : spec.at("coefficients")) {
      if (c.contains("window")) {
        cs.push_back(CoefficientDistribution::uniform_window(W, c["window"].at("lo").get<std::uint64_t>(),
                                                             c["window"].at("log2_width").get<unsigned>()));
      } else {
        std::vector<std::pair<std::uint64_t, Rational>> masses;
        for (const auto& entry : c.at("table")) masses.emplace_back(entry.at(0).get<std::uint64_t>(), rational_field(entry.at(1)));
        cs.push_back(CoefficientDistribution::table(W, masses));
      }
    }
    if (spec.contains("n") && spec.at("n").get<unsigned>() != cs.size())
      throw std::invalid_argument("n differs from the number of coefficients");
    const BigInt space = pow2(static_cast<unsigned>(cs.size()) * W);
    return PerturbationFamily::coefficient_product(cs, phi_field(spec, space), exponent_bound_field(spec));
  }
  if (kind == "explicit_table") {
    std::vector<std::pair<BitString, Rational>> points;
    for (const auto& entry : spec.at("points"))
      points.emplace_back(BitString::from_string(entry.at(0).get<std::string>()), rational_field(entry.at(1)));
    return PerturbationFamily::explicit_table(spec.at("n").get<unsigned>(), points,
                                              phi_field(spec, BigInt(points.size())), exponent_bound_field(spec));
  }
  if (kind == "graph_flip") {
    const unsigned v = spec.at("vertices").get<unsigned>();
    const BitString base = BitString::from_string(spec.at("base").get<std::string>());
    const BigInt space = pow2(static_cast<unsigned>(graphs::pair_count(v)));
    return PerturbationFamily::graph_flip(v, base, rational_field(spec.at("flip")), phi_field(spec, space),
                                          exponent_bound_field(spec));
  }
  throw std::invalid_argument("unknown family kind '" + kind + "'");
}

json codec_report(const PerturbationFamily& family, bool exhaustive, std::uint64_t samples, std::uint64_t seed) {
  json report;
  report["exhaustive"] = exhaustive;
  report["family_kind"] = to_string(family.kind());
  report["length_field_width"] = codec::length_field_width(family);
  if (exhaustive) {
    const auto inj = codec::verify_injective(family);
    const auto len = codec::verify_lengths(family);
    const auto st = codec::verify_structure(family);
    report["injective"] = inj.injective;
    report["lengths_ok"] = len.lengths_ok;
    report["intervals_disjoint"] = st.intervals_disjoint;
    report["mass_below_prefix"] = st.mass_below_prefix;
    report["round_trip"] = st.round_trip;
    report["checked"] = inj.checked;
    report["worst_case"] = {{"point", len.worst_point.to_string()},
                            {"length", len.worst_length},
                            {"expected", len.worst_expected}};
    if (inj.collision)
      report["collision"] = {inj.collision->first.to_string(), inj.collision->second.to_string()};
    return report;
  }
  std::set<BitString> points;
  for (std::uint64_t i = 0; i < samples; ++i) points.insert(family.sample(trial_seed(seed, i)));
  std::set<BitString> codes;
  bool injective = true, lengths = true, round_trip = true;
  BitString worst;
  std::size_t worst_len = 0, worst_expected = 0;
  for (const auto& y : points) {
    const auto code = codec::compress(family, y);
    injective = codes.insert(code.bits).second && injective;
    const std::size_t expected = codec::expected_length(family, y);
    lengths = lengths && code.bits.size() == expected;
    round_trip = round_trip && codec::decompress(family, code) == y;
    if (code.bits.size() >= worst_len) {
      worst_len = code.bits.size();
      worst_expected = expected;
      worst = y;
    }
  }
  report["injective"] = injective;
  report["lengths_ok"] = lengths;
  report["round_trip"] = round_trip;
  report["checked"] = points.size();
  report["worst_case"] = {{"point", worst.to_string()}, {"length", worst_len}, {"expected", worst_expected}};
  return report;
}

std::vector<std::int64_t> parse_int_grid(const std::string& text) {
  std::vector<std::int64_t> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto second = text.find(':', colon + 1);
    if (second == std::string::npos) throw std::invalid_argument("grid must be lo:hi:step or a comma list");
    const std::int64_t lo = std::stoll(text.substr(0, colon));
    const std::int64_t hi = std::stoll(text.substr(colon + 1, second - colon - 1));
    const std::int64_t step = std::stoll(text.substr(second + 1));
    if (step <= 0 || hi < lo) throw std::invalid_argument("grid needs lo <= hi and step > 0");
    for (std::int64_t d = lo; d <= hi; d += step) out.push_back(d);
    return out;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    out.push_back(std::stoll(cell, &used));
    if (used != cell.size()) throw std::invalid_argument("not an integer: '" + cell + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

std::vector<Rational> parse_rational_grid(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_rational(cell));
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

}  // namespace smoothed::harness
