#pragma once

// Parameterized families of discrete distributions D_{n,x,phi}.
//
// Every family exposes exact point masses, the exact cumulative
// distribution in lexicographic order of fixed-length encodings, an
// inverse of the cumulative (used by the sampler and the codec decoder),
// and support enumeration for small supports.

#include "smoothed/bits.hpp"
#include "smoothed/numeric.hpp"
#include "smoothed/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace smoothed {

/// Dyadic density bound numerator / 2^exponent.
struct Phi {
  BigInt numerator;
  unsigned exponent = 0;

  Rational value() const { return dyadic(numerator, exponent); }

  static Phi one() { return {BigInt(1), 0}; }
};

/// phi = rho / N, the harness-facing way of picking a regime between the
/// average case (rho = 1) and the worst case (rho = N).
struct DensityMultiplier {
  BigInt rho;
};

/// Rounds rho/N up to the grid k / 2^grid_exponent.
Phi phi_from_rho(const DensityMultiplier& rho, const BigInt& support_size, unsigned grid_exponent);
/// Grid exponent defaults to ceil(log2 N), exact whenever N is a power of two.
Phi phi_from_rho(const DensityMultiplier& rho, const BigInt& support_size);

constexpr unsigned default_phi_exponent_bound(unsigned n) { return n * n + 16; }

/// Distribution of one W-bit coefficient.
class CoefficientDistribution {
 public:
  struct Window {
    std::uint64_t lo;
    unsigned log2_width;
  };
  struct Table {
    std::vector<std::uint64_t> values;  // ascending, positive mass only
    std::vector<Rational> masses;
    std::vector<Rational> prefix;  // prefix[i] = P(a <= values[i])
  };

  /// Uniform on {lo, ..., lo + 2^log2_width - 1}.
  static CoefficientDistribution uniform_window(unsigned bit_width, std::uint64_t lo, unsigned log2_width);
  /// Explicit masses; zero-mass entries are dropped, masses must sum to 1.
  static CoefficientDistribution table(unsigned bit_width,
                                       std::vector<std::pair<std::uint64_t, Rational>> masses);
  /// Two-point distribution used by edge flips: value `base` with mass
  /// 1 - flip, the other bit with mass flip.
  static CoefficientDistribution bernoulli_flip(bool base, const Rational& flip);

  unsigned bit_width() const { return bit_width_; }
  bool is_window() const { return std::holds_alternative<Window>(repr_); }
  const Window* window() const { return std::get_if<Window>(&repr_); }
  const Table* table() const { return std::get_if<Table>(&repr_); }

  Rational mass(std::uint64_t v) const;
  /// P(a <= v).
  Rational cdf(std::uint64_t v) const;
  /// P(a < v).
  Rational cdf_below(std::uint64_t v) const;
  Rational max_mass() const;
  /// Smallest value attaining max_mass().
  std::uint64_t argmax() const;
  std::uint64_t support_size() const;
  std::vector<std::uint64_t> support() const;
  std::uint64_t min_value() const;
  std::uint64_t max_value() const;

  /// Smallest v with cdf(v) > u, for u in [0, 1).
  std::uint64_t locate(const Rational& u) const;
  /// Inverse-CDF draw using 128 uniform bits.
  std::uint64_t sample(UniformSource& source) const;

 private:
  CoefficientDistribution(unsigned bit_width, std::variant<Window, Table> repr)
      : bit_width_(bit_width), repr_(std::move(repr)) {}

  unsigned bit_width_ = 0;
  std::variant<Window, Table> repr_;
};

enum class FamilyKind { CoefficientProduct, GraphFlip, ExplicitTable };

const char* to_string(FamilyKind kind);

class PerturbationFamily {
 public:
  /// n independent W-bit coefficients, encoded as w_1 || ... || w_n big-endian.
  static PerturbationFamily coefficient_product(std::vector<CoefficientDistribution> coefficients, Phi phi,
                                                std::optional<unsigned> exponent_bound = {});
  /// Each of the C(vertices, 2) adjacency bits of `base` is flipped
  /// independently with probability `flip`.
  static PerturbationFamily graph_flip(unsigned vertices, BitString base, const Rational& flip, Phi phi,
                                       std::optional<unsigned> exponent_bound = {});
  /// Explicit list of equal-length strings; zero-mass entries belong to
  /// S_{n,x} but not to the support.
  static PerturbationFamily explicit_table(unsigned n, std::vector<std::pair<BitString, Rational>> points, Phi phi,
                                           std::optional<unsigned> exponent_bound = {});

  FamilyKind kind() const { return kind_; }
  unsigned n() const { return n_; }
  const Phi& phi() const { return phi_; }
  /// N_{n,x} = |S_{n,x}|.
  const BigInt& support_space_size() const { return space_size_; }
  /// Number of strings with positive mass.
  BigInt support_count() const;
  std::size_t string_length() const { return length_; }
  /// The adversarial seed x: window centers for coefficient products,
  /// the base adjacency string for graph flips.
  const BitString& adversarial_seed() const { return seed_; }

  bool is_product() const { return kind_ != FamilyKind::ExplicitTable; }
  const std::vector<CoefficientDistribution>& coefficients() const { return coefficients_; }

  Rational point_mass(const BitString& y) const;
  /// Sum of point masses over all z <= y in lexicographic order.
  Rational cumulative(const BitString& y) const;
  /// Sum of point masses over all z < y.
  Rational cumulative_below(const BitString& y) const;
  /// Smallest y with cumulative(y) > u, for u in [0, 1).
  BitString locate(const Rational& u) const;
  BitString sample(std::uint64_t seed) const;
  /// Support points in lexicographic order; throws when the support has
  /// more than `limit` points.
  std::vector<BitString> enumerate_support(std::uint64_t limit) const;

  std::vector<std::uint64_t> decode_coefficients(const BitString& y) const;
  BitString encode_coefficients(const std::vector<std::uint64_t>& values) const;

 private:
  PerturbationFamily() = default;
  void check_length(const BitString& y) const;
  void validate_phi(std::optional<unsigned> exponent_bound) const;

  FamilyKind kind_ = FamilyKind::ExplicitTable;
  unsigned n_ = 0;
  Phi phi_;
  BigInt space_size_;
  std::size_t length_ = 0;
  BitString seed_;
  std::vector<CoefficientDistribution> coefficients_;
  // ExplicitTable: positive-mass points in lexicographic order.
  std::vector<BitString> points_;
  std::vector<Rational> masses_;
  std::vector<Rational> prefix_;
};

struct MassBoundReport {
  bool ok = true;
  BitString worst_point;
  Rational worst_mass;
  /// Coefficient index attaining worst_mass (coefficient products only).
  std::optional<std::size_t> worst_coefficient;
};

/// Exact density check: max mass <= phi on tables, (max mass)^n <= phi per
/// coefficient on coefficient products, product of per-bit maxima <= phi
/// on graph flips.
MassBoundReport mass_bound_check(const PerturbationFamily& family);

/// Per-coefficient check (max mass)^n <= phi.
bool coefficient_mass_ok(const CoefficientDistribution& dist, unsigned n, const Phi& phi);

}  // namespace smoothed
