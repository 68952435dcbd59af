#include "smoothed/models.hpp"

#include <algorithm>
#include <random>

namespace smoothed {

CoefficientModel parse_coefficient_model(const std::string& name) {
  if (name == "window") return CoefficientModel::Window;
  if (name == "peak") return CoefficientModel::Peak;
  throw PreconditionError("unknown coefficient model '" + name + "'");
}

const char* to_string(CoefficientModel model) {
  return model == CoefficientModel::Window ? "window" : "peak";
}

unsigned window_log2_width(unsigned n, unsigned bit_width, const Phi& phi) {
  const Rational bound = phi.value();
  for (unsigned m = 0; m <= bit_width; ++m) {
    if (pow(Rational(BigInt(1), pow2(m)), n) <= bound) return m;
  }
  throw DomainError("phi is below the average case 2^-(nW)");
}

unsigned coefficient_exponent_bound(unsigned n, unsigned bit_width) {
  return std::max(default_phi_exponent_bound(n), n * bit_width);
}

namespace {

CoefficientDistribution peak_distribution(unsigned n, unsigned bit_width, const Phi& phi, std::mt19937_64& adversary) {
  const unsigned grid = bit_width + 16;
  const Rational bound = phi.value();
  // Largest k with (k / 2^grid)^n <= phi.
  BigInt lo = 1;
  BigInt hi = pow2(grid);
  if (pow(Rational(hi, pow2(grid)), n) <= bound) lo = hi;
  while (lo < hi) {
    const BigInt mid = (lo + hi + 1) / 2;
    if (pow(Rational(mid, pow2(grid)), n) <= bound) lo = mid;
    else hi = mid - 1;
  }
  const Rational r(lo, pow2(grid));
  const Rational full_count = Rational(1) / r;
  const BigInt count = numerator(full_count) / denominator(full_count);
  const Rational remainder = Rational(1) - r * Rational(count);
  const std::uint64_t points = count.convert_to<std::uint64_t>() + (remainder > 0 ? 1 : 0);
  const std::uint64_t range = std::uint64_t{1} << bit_width;
  if (points > range) throw DomainError("peak model needs more values than the coefficient range");
  const std::uint64_t start = std::uniform_int_distribution<std::uint64_t>(0, range - points)(adversary);
  std::vector<std::pair<std::uint64_t, Rational>> masses;
  for (std::uint64_t i = 0; i < count; ++i) masses.emplace_back(start + i, r);
  if (remainder > 0) masses.emplace_back(start + count.convert_to<std::uint64_t>(), remainder);
  return CoefficientDistribution::table(bit_width, std::move(masses));
}

}  // namespace

PerturbationFamily coefficient_family(unsigned n, unsigned bit_width, const BigInt& rho, std::uint64_t adversary_seed,
                                      CoefficientModel model) {
  if (n == 0) throw PreconditionError("coefficient family needs n >= 1");
  const BigInt space = pow2(n * bit_width);
  const Phi phi = phi_from_rho({rho}, space, n * bit_width);
  std::mt19937_64 adversary(adversary_seed);
  std::vector<CoefficientDistribution> coefficients;
  coefficients.reserve(n);
  for (unsigned i = 0; i < n; ++i) {
    if (model == CoefficientModel::Window) {
      const unsigned m = window_log2_width(n, bit_width, phi);
      const std::uint64_t slots = (std::uint64_t{1} << bit_width) - (std::uint64_t{1} << m);
      const std::uint64_t lo = std::uniform_int_distribution<std::uint64_t>(0, slots)(adversary);
      coefficients.push_back(CoefficientDistribution::uniform_window(bit_width, lo, m));
    } else {
      coefficients.push_back(peak_distribution(n, bit_width, phi, adversary));
    }
  }
  return PerturbationFamily::coefficient_product(std::move(coefficients), phi,
                                                 coefficient_exponent_bound(n, bit_width));
}

}  // namespace smoothed
