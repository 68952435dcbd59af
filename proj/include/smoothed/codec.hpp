#pragma once

// Injective, length-bounded compression driven by the exact cumulative
// distribution of a family.
//
//   Literal:  0 || y                                   (D(y) <  2^-|y|)
//   Interval: 1 || bin(|a|) || a || 0^(ceil(log2 1/D(y)) - |a|)
//
// where a is the longest bit string with [F(y-), F(y-) + D(y)) contained in
// the dyadic interval [0.a, 0.a + 2^-|a|), i.e. the common prefix of the
// binary expansions of the interval's endpoints. bin(|a|) has a fixed width
// of c * ceil(log2 n) bits.

#include "smoothed/family.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace smoothed::codec {

enum class CaseTag { Literal, Interval };

struct CodeWord {
  BitString bits;
  CaseTag tag = CaseTag::Literal;

  friend bool operator==(const CodeWord&, const CodeWord&) = default;
};

/// Width of the bin(|a|) field: c * max(1, ceil(log2 n)) with the smallest
/// c >= 1 that can represent every |a| <= string length.
unsigned length_field_width(const PerturbationFamily& family);

/// Longest common prefix of the binary expansions of low and low + width,
/// reading the right endpoint of the half-open interval from below.
BitString interval_prefix(const Rational& low, const Rational& width);

CodeWord compress(const PerturbationFamily& family, const BitString& y);
BitString decompress(const PerturbationFamily& family, const CodeWord& code);

/// Code length predicted by the length formula.
std::size_t expected_length(const PerturbationFamily& family, const BitString& y);

constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 20;

struct InjectivityReport {
  bool injective = true;
  std::uint64_t checked = 0;
  std::optional<std::pair<BitString, BitString>> collision;
};

struct LengthViolation {
  BitString point;
  std::size_t length;
  std::size_t expected;
};

struct LengthReport {
  bool lengths_ok = true;
  std::uint64_t checked = 0;
  std::vector<LengthViolation> violations;
  /// Point with the longest code word.
  BitString worst_point;
  std::size_t worst_length = 0;
  std::size_t worst_expected = 0;
};

struct StructureReport {
  bool intervals_disjoint = true;
  bool mass_below_prefix = true;  // D(y) <= 2^-|a| for every Interval code
  bool round_trip = true;
  std::uint64_t checked = 0;
  std::optional<BitString> first_failure;
};

InjectivityReport verify_injective(const PerturbationFamily& family, std::uint64_t limit = kExhaustiveLimit);
LengthReport verify_lengths(const PerturbationFamily& family, std::uint64_t limit = kExhaustiveLimit);
StructureReport verify_structure(const PerturbationFamily& family, std::uint64_t limit = kExhaustiveLimit);

}  // namespace smoothed::codec
