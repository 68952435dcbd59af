#include "smoothed/codec.hpp"

#include <algorithm>
#include <unordered_map>

namespace smoothed::codec {

namespace {

unsigned bit_length(std::uint64_t v) {
  unsigned k = 0;
  while (v != 0) {
    ++k;
    v >>= 1;
  }
  return k;
}

struct Encoded {
  CodeWord code;
  Rational low;
  Rational mass;
  std::size_t prefix_length = 0;
};

Encoded encode(const PerturbationFamily& family, const BitString& y) {
  Encoded out;
  out.mass = family.point_mass(y);
  if (out.mass == 0) throw DomainError("compress: " + y.to_string() + " is outside the support");
  const Rational literal_threshold(BigInt(1), pow2(static_cast<unsigned>(y.size())));
  if (out.mass < literal_threshold) {
    out.code.tag = CaseTag::Literal;
    out.code.bits.push_back(false);
    out.code.bits.append(y);
    return out;
  }
  out.low = family.cumulative_below(y);
  const BitString a = interval_prefix(out.low, out.mass);
  const unsigned padded = ceil_log2_inverse(out.mass);
  if (a.size() > padded) throw std::logic_error("interval prefix longer than ceil(log2 1/D)");
  out.prefix_length = a.size();
  out.code.tag = CaseTag::Interval;
  out.code.bits.push_back(true);
  out.code.bits.append_uint(a.size(), length_field_width(family));
  out.code.bits.append(a);
  for (std::size_t i = a.size(); i < padded; ++i) out.code.bits.push_back(false);
  return out;
}

}  // namespace

unsigned length_field_width(const PerturbationFamily& family) {
  const unsigned per_log = std::max(1u, ceil_log2(family.n()));
  const unsigned needed = bit_length(family.string_length());
  unsigned c = 1;
  while (c * per_log < needed) ++c;
  return c * per_log;
}

BitString interval_prefix(const Rational& low, const Rational& width) {
  if (width <= 0) throw DomainError("interval_prefix: empty interval");
  const Rational high = low + width;
  BitString a;
  Rational base = 0;
  Rational size = 1;
  while (true) {
    size /= 2;
    const Rational mid = base + size;
    if (high <= mid) {
      a.push_back(false);
    } else if (low >= mid) {
      a.push_back(true);
      base = mid;
    } else {
      return a;
    }
  }
}

CodeWord compress(const PerturbationFamily& family, const BitString& y) { return encode(family, y).code; }

BitString decompress(const PerturbationFamily& family, const CodeWord& code) {
  if (code.bits.empty()) throw EncodingError("empty code word");
  if (!code.bits[0]) {
    BitString y = code.bits.slice(1, code.bits.size() - 1);
    if (y.size() != family.string_length()) throw EncodingError("literal code has the wrong length");
    return y;
  }
  const unsigned width = length_field_width(family);
  if (code.bits.size() < 1 + width) throw EncodingError("truncated interval code");
  const std::uint64_t prefix_length = code.bits.read_uint(1, width);
  if (code.bits.size() < 1 + width + prefix_length) throw EncodingError("truncated interval prefix");
  // The interval of the encoded string contains the midpoint of the
  // dyadic interval named by a.
  Rational mid = 0;
  Rational step = 1;
  for (std::size_t i = 0; i < prefix_length; ++i) {
    step /= 2;
    if (code.bits[1 + width + i]) mid += step;
  }
  mid += step / 2;
  return family.locate(mid);
}

std::size_t expected_length(const PerturbationFamily& family, const BitString& y) {
  const Rational mass = family.point_mass(y);
  if (mass == 0) throw DomainError("expected_length: point outside the support");
  if (mass < Rational(BigInt(1), pow2(static_cast<unsigned>(y.size())))) return 1 + y.size();
  return 1 + length_field_width(family) + ceil_log2_inverse(mass);
}

InjectivityReport verify_injective(const PerturbationFamily& family, std::uint64_t limit) {
  InjectivityReport report;
  std::unordered_map<BitString, BitString, BitStringHash> seen;
  for (const auto& y : family.enumerate_support(limit)) {
    CodeWord code = compress(family, y);
    ++report.checked;
    auto [it, inserted] = seen.emplace(code.bits, y);
    if (!inserted && report.injective) {
      report.injective = false;
      report.collision = std::make_pair(it->second, y);
    }
  }
  return report;
}

LengthReport verify_lengths(const PerturbationFamily& family, std::uint64_t limit) {
  LengthReport report;
  for (const auto& y : family.enumerate_support(limit)) {
    const CodeWord code = compress(family, y);
    const std::size_t expected = expected_length(family, y);
    ++report.checked;
    if (code.bits.size() != expected) {
      report.lengths_ok = false;
      if (report.violations.size() < 16) report.violations.push_back({y, code.bits.size(), expected});
    }
    if (code.bits.size() > report.worst_length || report.checked == 1) {
      report.worst_point = y;
      report.worst_length = code.bits.size();
      report.worst_expected = expected;
    }
  }
  return report;
}

StructureReport verify_structure(const PerturbationFamily& family, std::uint64_t limit) {
  StructureReport report;
  Rational previous_high = 0;
  auto fail = [&](const BitString& y) {
    if (!report.first_failure) report.first_failure = y;
  };
  for (const auto& y : family.enumerate_support(limit)) {
    ++report.checked;
    const Rational low = family.cumulative_below(y);
    const Rational mass = family.point_mass(y);
    // Support is enumerated in lexicographic order, so disjointness of all
    // pairs reduces to consecutive intervals not overlapping.
    if (low < previous_high) {
      report.intervals_disjoint = false;
      fail(y);
    }
    previous_high = low + mass;
    const Encoded e = encode(family, y);
    if (e.code.tag == CaseTag::Interval &&
        mass > Rational(BigInt(1), pow2(static_cast<unsigned>(e.prefix_length)))) {
      report.mass_below_prefix = false;
      fail(y);
    }
    if (decompress(family, e.code) != y) {
      report.round_trip = false;
      fail(y);
    }
  }
  return report;
}

}  // namespace smoothed::codec
