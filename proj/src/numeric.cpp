#include "smoothed/numeric.hpp"

#include <cmath>
#include <limits>

namespace smoothed {

unsigned ceil_log2_inverse(const Rational& q) {
  if (q <= 0 || q > 1) throw DomainError("ceil_log2_inverse: need 0 < q <= 1");
  // Smallest k with 2^-k <= q, i.e. den <= num * 2^k.
  const BigInt num = numerator(q);
  const BigInt den = denominator(q);
  unsigned k = 0;
  if (den > num) {
    k = static_cast<unsigned>(msb(den) - msb(num));
    if (k > 0) --k;
  }
  while ((num << k) < den) ++k;
  return k;
}

unsigned ceil_log2(std::uint64_t v) {
  unsigned k = 0;
  while (k < 64 && (std::uint64_t{1} << k) < v) ++k;
  return k;
}

Rational pow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent > 0) b *= b;
  }
  return result;
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  const auto point = text.find('.');
  try {
    if (point != std::string::npos && slash == std::string::npos) {
      const std::string whole = text.substr(0, point), frac = text.substr(point + 1);
      if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos)
        throw EncodingError("malformed rational '" + text + "'");
      const bool negative = !whole.empty() && whole[0] == '-';
      const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
      const BigInt int_part(whole.empty() || whole == "-" ? "0" : whole);
      const Rational magnitude = Rational(abs(int_part)) + Rational(BigInt(frac), scale);
      return negative ? -magnitude : magnitude;
    }
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw EncodingError("zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw EncodingError("malformed rational '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::string to_string(const BigInt& z) { return z.str(); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

double to_double(const BigInt& z) { return z.convert_to<double>(); }

double to_double_up(const Rational& q) {
  double d = q.convert_to<double>();
  while (Rational(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

namespace {

double log2_big(const BigInt& z) {
  const auto top = static_cast<unsigned>(msb(z));
  if (top < 60) return std::log2(z.convert_to<double>());
  const BigInt head = z >> (top - 60);
  return std::log2(head.convert_to<double>()) + static_cast<double>(top - 60);
}

}  // namespace

double nth_root_up(const Rational& q, unsigned n) {
  if (n == 0) throw DomainError("nth_root_up: n must be positive");
  if (q <= 0) throw DomainError("nth_root_up: need q > 0");
  const double log2q = log2_big(numerator(q)) - log2_big(denominator(q));
  double r = std::exp2(log2q / n);
  // Walk down then up so r is the smallest double with r^n >= q.
  while (r > 0 && pow(Rational(r), n) >= q) r = std::nextafter(r, 0.0);
  while (pow(Rational(r), n) < q) r = std::nextafter(r, std::numeric_limits<double>::infinity());
  return r;
}

}  // namespace smoothed
