#include "smoothed/scheme.hpp"

namespace smoothed::scheme {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::Bottom: return "bottom";
  }
  return "?";
}

BigInt scheme_budget(const SchemeParameters& params, const Rational& delta) {
  if (delta <= 0) throw PreconditionError("scheme_budget: delta must be positive");
  const Rational base = Rational(BigInt(params.n)) * Rational(params.support_size) * params.phi / delta;
  const Rational value = pow(base, params.exponent_inverse);
  BigInt budget = numerator(value) / denominator(value);
  if (Rational(budget) < value) ++budget;
  return budget;
}

}  // namespace smoothed::scheme
