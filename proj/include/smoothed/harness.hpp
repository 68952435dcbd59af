#pragma once

// Seeded Monte Carlo campaigns over the library's algorithms, the
// moment and tail estimators for step counts, and CSV persistence.

#include "smoothed/binopt.hpp"
#include "smoothed/family.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothed::harness {

using json = nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

/// Invalid configuration; the message lists every offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::vector<std::string> offenders);
  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

struct ExperimentConfig {
  std::string command;                // solve | gapsim | colorsim | scheme-sim | tailcheck | codec-check
  std::string structure = "subsets";  // subsets | card:k | path to a file of 0/1 vectors
  unsigned n = 8;
  unsigned W = 0;  // 0: same as n
  unsigned k = 3;
  std::string rho = "1";
  std::optional<unsigned> phi_exp;  // colorsim: phi = 2^-phi_exp
  std::string flip;                 // colorsim: flip probability, used when phi_exp is unset
  std::string model = "window";
  std::string ranking = "lex";
  std::optional<std::int64_t> t;  // default n * 2^W / 4
  unsigned start_bits = 0;        // 0: ceil(log2 n) + 1
  std::string delta_grid;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::uint64_t adversary_seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string inner = "solve";  // solve | color
  std::string eps = "1/2";
  unsigned c = 3;
  std::string base = "multipartite";  // multipartite | complete | empty
  std::string family;                 // codec-check family file
  bool exhaustive = false;

  unsigned bit_width() const { return W == 0 ? n : W; }
  std::int64_t threshold() const;

  json to_json() const;
  /// Fields present in `j` replace the current values.
  void merge_json(const json& j);
  static ExperimentConfig from_json(const json& j);

  /// FNV-1a over the canonical JSON form without `out` and `threads`,
  /// as 16 hex digits.
  std::string hash() const;

  /// Throws ConfigError naming every invalid field.
  void validate() const;
};

binopt::SolutionStructure parse_structure(const std::string& spec, unsigned n);

struct TrialRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  BigInt steps;
  std::string outcome;  // yes/no for decisions, accept/reject/bottom for schemes
  unsigned bits_revealed = 0;
  bool clique_found = false;
  bool verified = true;  // agrees with the oracle when one was run

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct CampaignResult {
  std::vector<TrialRecord> records;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json summary;
  bool violation = false;
};

/// Runs the campaign selected by config.command. Records depend only on
/// the config and master seed, never on the worker count.
CampaignResult run_campaign(const ExperimentConfig& config);

/// Header line, column line, rows.
void write_csv(std::ostream& out, const ExperimentConfig& config, const CampaignResult& result);

struct CsvTable {
  json header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

struct MomentEstimate {
  double mean = 0;       // sample mean of t^eps
  double std_error = 0;  // standard error of that mean
  double bound = 0;      // n N phi
  double ratio = 0;      // mean / bound
};

/// t^eps is evaluated as exp(eps * log t) in 50-digit arithmetic.
double step_power(const BigInt& steps, const Rational& eps);

MomentEstimate moment_estimate(const std::vector<BigInt>& steps, const Rational& eps, unsigned n,
                               const Rational& support_times_phi);

struct TailRow {
  double threshold = 0;  // T
  double empirical = 0;  // Pr[t >= T]
  double std_error = 0;
  double bound = 0;      // min(1, n^c N phi / T^eps)
  double markov = 0;     // mean(t^eps) / T^eps + 3 std_error
};

/// Thresholds 2^(j/2), j = 0, 1, ..., up to twice the largest count.
std::vector<TailRow> tail_curve(const std::vector<BigInt>& steps, const Rational& eps, unsigned n, unsigned c,
                                const Rational& support_times_phi);

bool tail_below_bound(const std::vector<TailRow>& rows);
bool markov_consistent(const std::vector<TailRow>& rows);

/// Family specification files (format documented in the README).
PerturbationFamily family_from_json(const json& spec);

/// {injective, lengths_ok, worst_case, ...} for the given family. With
/// `exhaustive` the whole support is checked, otherwise `samples` draws.
json codec_report(const PerturbationFamily& family, bool exhaustive, std::uint64_t samples, std::uint64_t seed);

std::vector<std::int64_t> parse_int_grid(const std::string& text);
std::vector<Rational> parse_rational_grid(const std::string& text);

}  // namespace smoothed::harness
