#pragma once

// Exact arithmetic used throughout the library. All probabilities are
// big rationals; floating point only appears in summary statistics.

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smoothed {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

class EncodingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline BigInt pow2(unsigned exponent) { return BigInt(1) << exponent; }

inline Rational dyadic(const BigInt& numerator, unsigned exponent) {
  return Rational(numerator, pow2(exponent));
}

// ceil(log2(1/q)) for 0 < q <= 1.
unsigned ceil_log2_inverse(const Rational& q);

// ceil(log2(v)) for v >= 1; 0 for v <= 1.
unsigned ceil_log2(std::uint64_t v);

Rational pow(const Rational& base, unsigned exponent);

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
std::string to_string(const BigInt& z);

// Nearest double at or above q (q >= 0).
double to_double_up(const Rational& q);
double to_double(const Rational& q);
double to_double(const BigInt& z);

// Smallest double r with r^n >= q, for 0 < q <= 1. The n-th root of a
// dyadic density bound is irrational in general; comparisons elsewhere
// use n-th powers and this is only used to render bound columns.
double nth_root_up(const Rational& q, unsigned n);

}  // namespace smoothed
