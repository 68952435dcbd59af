#include "smoothed/codec.hpp"
#include "smoothed/models.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace smoothed;
using namespace smoothed::codec;

namespace {

BitString bits(const char* s) { return BitString::from_string(s); }

BigInt floor_of(const Rational& q) {
  BigInt r = numerator(q) / denominator(q);
  if (Rational(r) > q) --r;
  return r;
}

// Longest k with [low, high) inside one cell of the grid 2^-k, found by
// comparing the cells of low and of the last point below high.
BitString prefix_oracle(const Rational& low, const Rational& width) {
  const Rational high = low + width;
  unsigned k = 0;
  while (true) {
    const Rational scale(pow2(k + 1));
    const BigInt cell_low = floor_of(low * scale);
    BigInt cell_high = floor_of(high * scale);
    if (Rational(cell_high) == high * scale) --cell_high;
    if (cell_low != cell_high) break;
    ++k;
  }
  return BitString::from_uint(floor_of(low * Rational(pow2(k))).convert_to<std::uint64_t>(), k);
}

PerturbationFamily uniform_strings(unsigned length, unsigned count, unsigned n = 4) {
  std::vector<std::pair<BitString, Rational>> pts;
  for (unsigned i = 0; i < count; ++i)
    pts.emplace_back(BitString::from_uint(static_cast<std::uint64_t>(i) * ((1u << length) / count), length),
                     Rational(1, count));
  return PerturbationFamily::explicit_table(n, pts, Phi{1, ceil_log2(count)});
}

}  // namespace

TEST(Compress, LiteralBelowThreshold) {
  // The target has mass 2^-5 = 2^-(|y|+1).
  std::vector<std::pair<BitString, Rational>> pts = {{bits("0101"), Rational(1, 32)}, {bits("1111"), Rational(31, 32)}};
  const auto f = PerturbationFamily::explicit_table(2, pts, Phi{1, 0});
  const auto code = compress(f, bits("0101"));
  EXPECT_EQ(code.tag, CaseTag::Literal);
  EXPECT_EQ(code.bits, bits("00101"));
  EXPECT_EQ(code.bits.size(), 5u);
  EXPECT_EQ(decompress(f, code), bits("0101"));
}

TEST(Compress, BoundaryGoesToInterval) {
  // D(y) = 2^-|y| exactly.
  std::vector<std::pair<BitString, Rational>> pts = {{bits("01"), Rational(1, 4)}, {bits("11"), Rational(3, 4)}};
  const auto f = PerturbationFamily::explicit_table(2, pts, Phi{1, 0});
  EXPECT_EQ(compress(f, bits("01")).tag, CaseTag::Interval);
}

TEST(Compress, SinglePoint) {
  const auto f = PerturbationFamily::explicit_table(4, {{bits("10110"), Rational(1)}}, Phi::one());
  const auto code = compress(f, bits("10110"));
  EXPECT_EQ(code.tag, CaseTag::Interval);
  const unsigned c_log = length_field_width(f);
  EXPECT_EQ(code.bits.size(), 1u + c_log);
  EXPECT_EQ(code.bits.read_uint(1, c_log), 0u);
  EXPECT_EQ(decompress(f, code), bits("10110"));
  EXPECT_TRUE(verify_injective(f).injective);
}

TEST(Compress, UniformFourOfLengthEight) {
  const auto f = uniform_strings(8, 4);
  const unsigned c_log = length_field_width(f);
  for (const auto& y : f.enumerate_support(16)) {
    const Rational low = f.cumulative_below(y);
    const BitString a = prefix_oracle(low, f.point_mass(y));
    EXPECT_LE(a.size(), 2u);
    EXPECT_EQ(interval_prefix(low, f.point_mass(y)), a);
    const auto code = compress(f, y);
    EXPECT_LE(code.bits.size(), 1u + c_log + 2);
    EXPECT_EQ(code.bits.size(), 1u + c_log + 2);
  }
}

TEST(Compress, OutsideSupport) {
  EXPECT_THROW(compress(uniform_strings(8, 4), BitString::from_uint(1, 8)), DomainError);
}

TEST(LengthField, RepresentsStringLength) {
  // n = 4: ceil(log2 n) = 2, strings of 8 bits need 4 bits, so c = 2.
  EXPECT_EQ(length_field_width(uniform_strings(8, 4, 4)), 4u);
  EXPECT_EQ(length_field_width(uniform_strings(3, 2, 4)), 2u);
  EXPECT_EQ(length_field_width(uniform_strings(3, 2, 1)), 2u);
}

TEST(IntervalPrefix, TwoPoint) {
  EXPECT_EQ(interval_prefix(0, Rational(1, 2)), bits("0"));
  EXPECT_EQ(interval_prefix(Rational(1, 2), Rational(1, 2)), bits("1"));
  EXPECT_EQ(interval_prefix(0, 1), BitString());
}

TEST(IntervalPrefix, MatchesOracle) {
  for (unsigned den = 1; den <= 40; ++den)
    for (unsigned lo = 0; lo < den; ++lo)
      for (unsigned w = 1; lo + w <= den; ++w) {
        const Rational low(lo, den), width(w, den);
        ASSERT_EQ(interval_prefix(low, width), prefix_oracle(low, width)) << lo << "/" << den << " + " << w;
      }
}

TEST(VerifyInjective, TwoPointCodesDifferInPrefix) {
  const auto f = uniform_strings(3, 2);
  const auto support = f.enumerate_support(4);
  const auto a = compress(f, support[0]);
  const auto b = compress(f, support[1]);
  const unsigned width = length_field_width(f);
  EXPECT_EQ(a.bits.read_uint(1, width), 1u);
  EXPECT_EQ(b.bits.read_uint(1, width), 1u);
  EXPECT_FALSE(a.bits[1 + width]);
  EXPECT_TRUE(b.bits[1 + width]);
  EXPECT_TRUE(verify_injective(f).injective);
}

TEST(VerifyInjective, Uniform256) {
  const auto f = uniform_strings(8, 256);
  const auto r = verify_injective(f);
  EXPECT_TRUE(r.injective);
  EXPECT_EQ(r.checked, 256u);
}

TEST(VerifyLengths, UniformPowerOfTwo) {
  for (unsigned k = 0; k <= 6; ++k) {
    const auto f = uniform_strings(8, 1u << k);
    const auto r = verify_lengths(f);
    EXPECT_TRUE(r.lengths_ok);
    for (const auto& y : f.enumerate_support(256)) {
      const auto code = compress(f, y);
      ASSERT_EQ(code.tag, CaseTag::Interval);
      EXPECT_EQ(code.bits.size(), 1u + length_field_width(f) + k);
    }
  }
}

TEST(VerifyLengths, PointMassOne) {
  const auto f = uniform_strings(6, 1);
  EXPECT_EQ(expected_length(f, f.enumerate_support(1)[0]), 1u + length_field_width(f));
}

TEST(RoundTrip, GeneratedProductFamilies) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const unsigned n = 2 + seed % 3;
    const unsigned W = 12 / n;
    const auto f = coefficient_family(n, W, BigInt(1) << (seed % 7), seed,
                                      seed % 2 ? CoefficientModel::Peak : CoefficientModel::Window);
    const auto support = f.enumerate_support(1u << 12);
    std::set<BitString> seen;
    for (const auto& y : support) {
      const auto code = compress(f, y);
      EXPECT_TRUE(seen.insert(code.bits).second);
      EXPECT_EQ(decompress(f, code), y);
      EXPECT_EQ(code.bits.size(), expected_length(f, y));
    }
    const auto s = verify_structure(f);
    EXPECT_TRUE(s.intervals_disjoint && s.mass_below_prefix && s.round_trip);
  }
}

TEST(RoundTrip, SkewedTableMixesCases) {
  // Masses 1/2, 1/4, 1/8, ... down to tiny ones produce both cases.
  std::vector<std::pair<BitString, Rational>> pts;
  Rational left = 1;
  for (unsigned i = 0; i < 15; ++i) {
    pts.emplace_back(BitString::from_uint(i, 4), left / 2);
    left /= 2;
  }
  pts.emplace_back(BitString::from_uint(15, 4), left);
  const auto f = PerturbationFamily::explicit_table(4, pts, Phi{1, 1});
  std::set<CaseTag> tags;
  for (const auto& [y, m] : pts) {
    const auto code = compress(f, y);
    tags.insert(code.tag);
    EXPECT_EQ(decompress(f, code), y);
  }
  EXPECT_EQ(tags.size(), 2u);
  EXPECT_TRUE(verify_injective(f).injective);
  EXPECT_TRUE(verify_lengths(f).lengths_ok);
}

TEST(Limits, RefusesLargeSupport) {
  std::vector<CoefficientDistribution> cs(3, CoefficientDistribution::uniform_window(8, 0, 8));
  const auto f = PerturbationFamily::coefficient_product(cs, Phi{1, 24});
  EXPECT_THROW(verify_injective(f, 1u << 20), PreconditionError);
}
