#include "smoothed/family.hpp"

#include <algorithm>
#include <string>

namespace smoothed {

namespace {

constexpr unsigned kMaxBitWidth = 62;

BigInt draw_as_int(const UniformSource::Draw128& d) {
  BigInt u = d.hi;
  u <<= 64;
  u += d.lo;
  return u;
}

// First index i with prefix[i] > U / 2^128.
std::size_t first_prefix_above(const std::vector<Rational>& prefix, const BigInt& scaled_u) {
  const auto it = std::partition_point(prefix.begin(), prefix.end(), [&](const Rational& p) {
    return !(numerator(p) << 128 > scaled_u * denominator(p));
  });
  if (it == prefix.end()) return prefix.size() - 1;
  return static_cast<std::size_t>(it - prefix.begin());
}

}  // namespace

Phi phi_from_rho(const DensityMultiplier& rho, const BigInt& support_size, unsigned grid_exponent) {
  if (support_size < 1) throw DomainError("support size must be positive");
  if (rho.rho < 1 || rho.rho > support_size)
    throw DomainError("rho must lie in [1, N], got " + rho.rho.str());
  // Smallest k with k / 2^e >= rho / N.
  const BigInt scaled = rho.rho << grid_exponent;
  BigInt k = scaled / support_size;
  if (k * support_size < scaled) ++k;
  return {k, grid_exponent};
}

Phi phi_from_rho(const DensityMultiplier& rho, const BigInt& support_size) {
  if (support_size < 1) throw DomainError("support size must be positive");
  unsigned e = static_cast<unsigned>(msb(support_size));
  if (pow2(e) < support_size) ++e;
  return phi_from_rho(rho, support_size, e);
}

// ---------------------------------------------------------------------------
// CoefficientDistribution

CoefficientDistribution CoefficientDistribution::uniform_window(unsigned bit_width, std::uint64_t lo,
                                                                unsigned log2_width) {
  if (bit_width == 0 || bit_width > kMaxBitWidth) throw DomainError("coefficient bit width must be in [1, 62]");
  if (log2_width > bit_width) throw DomainError("window wider than coefficient range");
  const std::uint64_t width = std::uint64_t{1} << log2_width;
  if (lo > (std::uint64_t{1} << bit_width) - width) throw DomainError("window exceeds coefficient range");
  return CoefficientDistribution(bit_width, Window{lo, log2_width});
}

CoefficientDistribution CoefficientDistribution::table(unsigned bit_width,
                                                       std::vector<std::pair<std::uint64_t, Rational>> masses) {
  if (bit_width == 0 || bit_width > kMaxBitWidth) throw DomainError("coefficient bit width must be in [1, 62]");
  std::sort(masses.begin(), masses.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Table t;
  Rational total = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto& [v, m] = masses[i];
    if (i > 0 && masses[i - 1].first == v) throw DomainError("duplicate coefficient value in table");
    if ((v >> bit_width) != 0) throw DomainError("coefficient value exceeds bit width");
    if (m < 0) throw DomainError("negative mass");
    if (m == 0) continue;
    total += m;
    t.values.push_back(v);
    t.masses.push_back(m);
    t.prefix.push_back(total);
  }
  if (total != 1) throw DomainError("coefficient masses sum to " + to_string(total) + ", not 1");
  return CoefficientDistribution(bit_width, std::move(t));
}

CoefficientDistribution CoefficientDistribution::bernoulli_flip(bool base, const Rational& flip) {
  if (flip < 0 || flip > 1) throw DomainError("flip probability outside [0, 1]");
  const std::uint64_t kept = base ? 1 : 0;
  return table(1, {{kept, Rational(1) - flip}, {kept ^ 1u, flip}});
}

Rational CoefficientDistribution::mass(std::uint64_t v) const {
  if (const auto* w = window()) {
    const std::uint64_t width = std::uint64_t{1} << w->log2_width;
    if (v < w->lo || v - w->lo >= width) return 0;
    return Rational(BigInt(1), pow2(w->log2_width));
  }
  const auto& t = *table();
  const auto it = std::lower_bound(t.values.begin(), t.values.end(), v);
  if (it == t.values.end() || *it != v) return 0;
  return t.masses[static_cast<std::size_t>(it - t.values.begin())];
}

Rational CoefficientDistribution::cdf(std::uint64_t v) const {
  if (const auto* w = window()) {
    const std::uint64_t width = std::uint64_t{1} << w->log2_width;
    if (v < w->lo) return 0;
    if (v - w->lo >= width - 1) return 1;
    return Rational(BigInt(v - w->lo + 1), pow2(w->log2_width));
  }
  const auto& t = *table();
  const auto it = std::upper_bound(t.values.begin(), t.values.end(), v);
  if (it == t.values.begin()) return 0;
  return t.prefix[static_cast<std::size_t>(it - t.values.begin()) - 1];
}

Rational CoefficientDistribution::cdf_below(std::uint64_t v) const {
  if (v == 0) return 0;
  return cdf(v - 1);
}

Rational CoefficientDistribution::max_mass() const {
  if (const auto* w = window()) return Rational(BigInt(1), pow2(w->log2_width));
  const auto& t = *table();
  return *std::max_element(t.masses.begin(), t.masses.end());
}

std::uint64_t CoefficientDistribution::argmax() const {
  if (const auto* w = window()) return w->lo;
  const auto& t = *table();
  const auto it = std::max_element(t.masses.begin(), t.masses.end());
  return t.values[static_cast<std::size_t>(it - t.masses.begin())];
}

std::uint64_t CoefficientDistribution::support_size() const {
  if (const auto* w = window()) return std::uint64_t{1} << w->log2_width;
  return table()->values.size();
}

std::vector<std::uint64_t> CoefficientDistribution::support() const {
  if (const auto* w = window()) {
    std::vector<std::uint64_t> out(std::uint64_t{1} << w->log2_width);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = w->lo + i;
    return out;
  }
  return table()->values;
}

std::uint64_t CoefficientDistribution::min_value() const {
  if (const auto* w = window()) return w->lo;
  return table()->values.front();
}

std::uint64_t CoefficientDistribution::max_value() const {
  if (const auto* w = window()) return w->lo + ((std::uint64_t{1} << w->log2_width) - 1);
  return table()->values.back();
}

std::uint64_t CoefficientDistribution::locate(const Rational& u) const {
  if (u < 0 || u >= 1) throw DomainError("locate: u must lie in [0, 1)");
  if (const auto* w = window()) {
    const Rational scaled = u * Rational(pow2(w->log2_width));
    const BigInt offset = numerator(scaled) / denominator(scaled);
    return w->lo + offset.convert_to<std::uint64_t>();
  }
  const auto& t = *table();
  const auto it = std::upper_bound(t.prefix.begin(), t.prefix.end(), u);
  return t.values[static_cast<std::size_t>(it - t.prefix.begin())];
}

std::uint64_t CoefficientDistribution::sample(UniformSource& source) const {
  const auto draw = source.next128();
  if (const auto* w = window()) {
    if (w->log2_width == 0) return w->lo;
    return w->lo + (draw.hi >> (64 - w->log2_width));
  }
  const auto& t = *table();
  return t.values[first_prefix_above(t.prefix, draw_as_int(draw))];
}

// ---------------------------------------------------------------------------
// PerturbationFamily

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::CoefficientProduct: return "product";
    case FamilyKind::GraphFlip: return "graph";
    case FamilyKind::ExplicitTable: return "table";
  }
  return "?";
}

void PerturbationFamily::validate_phi(std::optional<unsigned> exponent_bound) const {
  const unsigned bound = exponent_bound.value_or(default_phi_exponent_bound(n_));
  if (phi_.exponent > bound)
    throw DomainError("phi exponent " + std::to_string(phi_.exponent) + " exceeds bound " + std::to_string(bound));
  const Rational v = phi_.value();
  if (v > 1) throw DomainError("phi must not exceed 1");
  if (v * Rational(space_size_) < 1) throw DomainError("phi must be at least 1/N");
}

PerturbationFamily PerturbationFamily::coefficient_product(std::vector<CoefficientDistribution> coefficients, Phi phi,
                                                           std::optional<unsigned> exponent_bound) {
  if (coefficients.empty()) throw DomainError("coefficient product needs at least one coefficient");
  const unsigned width = coefficients.front().bit_width();
  for (const auto& c : coefficients)
    if (c.bit_width() != width) throw DomainError("all coefficients must share one bit width");
  PerturbationFamily f;
  f.kind_ = FamilyKind::CoefficientProduct;
  f.n_ = static_cast<unsigned>(coefficients.size());
  f.phi_ = std::move(phi);
  f.length_ = static_cast<std::size_t>(f.n_) * width;
  f.space_size_ = pow2(static_cast<unsigned>(f.length_));
  for (const auto& c : coefficients) {
    std::uint64_t center = c.argmax();
    if (const auto* w = c.window(); w && w->log2_width > 0) center = w->lo + (std::uint64_t{1} << (w->log2_width - 1));
    f.seed_.append_uint(center, width);
  }
  f.coefficients_ = std::move(coefficients);
  f.validate_phi(exponent_bound);
  return f;
}

PerturbationFamily PerturbationFamily::graph_flip(unsigned vertices, BitString base, const Rational& flip, Phi phi,
                                                  std::optional<unsigned> exponent_bound) {
  const std::size_t pairs = static_cast<std::size_t>(vertices) * (vertices - (vertices > 0 ? 1 : 0)) / 2;
  if (base.size() != pairs) throw EncodingError("base adjacency string must have C(n,2) bits");
  if (flip < 0 || flip > Rational(1, 2)) throw DomainError("flip probability must lie in [0, 1/2]");
  PerturbationFamily f;
  f.kind_ = FamilyKind::GraphFlip;
  f.n_ = vertices;
  f.phi_ = std::move(phi);
  f.length_ = pairs;
  f.space_size_ = pow2(static_cast<unsigned>(pairs));
  f.coefficients_.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) f.coefficients_.push_back(CoefficientDistribution::bernoulli_flip(base[i], flip));
  f.seed_ = std::move(base);
  f.validate_phi(exponent_bound);
  return f;
}

PerturbationFamily PerturbationFamily::explicit_table(unsigned n, std::vector<std::pair<BitString, Rational>> points,
                                                      Phi phi, std::optional<unsigned> exponent_bound) {
  if (points.empty()) throw DomainError("explicit table needs at least one point");
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PerturbationFamily f;
  f.kind_ = FamilyKind::ExplicitTable;
  f.n_ = n;
  f.phi_ = std::move(phi);
  f.length_ = points.front().first.size();
  f.space_size_ = BigInt(points.size());
  Rational total = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [y, m] = points[i];
    if (y.size() != f.length_) throw EncodingError("table strings must share one length");
    if (i > 0 && points[i - 1].first == y) throw DomainError("duplicate string in table: " + y.to_string());
    if (m < 0) throw DomainError("negative mass");
    if (m == 0) continue;
    total += m;
    f.points_.push_back(y);
    f.masses_.push_back(m);
    f.prefix_.push_back(total);
  }
  if (total != 1) throw DomainError("table masses sum to " + to_string(total) + ", not 1");
  f.validate_phi(exponent_bound);
  return f;
}

BigInt PerturbationFamily::support_count() const {
  if (!is_product()) return BigInt(points_.size());
  BigInt count = 1;
  for (const auto& c : coefficients_) count *= c.support_size();
  return count;
}

void PerturbationFamily::check_length(const BitString& y) const {
  if (y.size() != length_)
    throw EncodingError("expected a " + std::to_string(length_) + "-bit string, got " + std::to_string(y.size()));
}

std::vector<std::uint64_t> PerturbationFamily::decode_coefficients(const BitString& y) const {
  if (!is_product()) throw UnsupportedError("table families have no coefficient structure");
  check_length(y);
  const unsigned width = coefficients_.front().bit_width();
  std::vector<std::uint64_t> out(coefficients_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y.read_uint(i * width, width);
  return out;
}

BitString PerturbationFamily::encode_coefficients(const std::vector<std::uint64_t>& values) const {
  if (!is_product()) throw UnsupportedError("table families have no coefficient structure");
  if (values.size() != coefficients_.size()) throw EncodingError("wrong number of coefficients");
  const unsigned width = coefficients_.front().bit_width();
  BitString y;
  for (auto v : values) y.append_uint(v, width);
  return y;
}

Rational PerturbationFamily::point_mass(const BitString& y) const {
  check_length(y);
  if (is_product()) {
    const auto values = decode_coefficients(y);
    Rational p = 1;
    for (std::size_t i = 0; i < values.size() && p != 0; ++i) p *= coefficients_[i].mass(values[i]);
    return p;
  }
  const auto it = std::lower_bound(points_.begin(), points_.end(), y);
  if (it == points_.end() || *it != y) return 0;
  return masses_[static_cast<std::size_t>(it - points_.begin())];
}

Rational PerturbationFamily::cumulative_below(const BitString& y) const {
  check_length(y);
  if (is_product()) {
    // Digit-by-digit: strings below y agree with y on a prefix of
    // coefficients and are smaller at the first difference.
    const auto values = decode_coefficients(y);
    Rational below = 0;
    Rational prefix_mass = 1;
    for (std::size_t i = 0; i < values.size() && prefix_mass != 0; ++i) {
      below += prefix_mass * coefficients_[i].cdf_below(values[i]);
      prefix_mass *= coefficients_[i].mass(values[i]);
    }
    return below;
  }
  const auto it = std::lower_bound(points_.begin(), points_.end(), y);
  if (it == points_.begin()) return 0;
  return prefix_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

Rational PerturbationFamily::cumulative(const BitString& y) const {
  if (!is_product()) {
    check_length(y);
    const auto it = std::upper_bound(points_.begin(), points_.end(), y);
    if (it == points_.begin()) return 0;
    return prefix_[static_cast<std::size_t>(it - points_.begin()) - 1];
  }
  return cumulative_below(y) + point_mass(y);
}

BitString PerturbationFamily::locate(const Rational& u) const {
  if (u < 0 || u >= 1) throw DomainError("locate: u must lie in [0, 1)");
  if (!is_product()) {
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
    return points_[static_cast<std::size_t>(it - prefix_.begin())];
  }
  std::vector<std::uint64_t> values(coefficients_.size());
  Rational base = 0;
  Rational prefix_mass = 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& c = coefficients_[i];
    values[i] = c.locate((u - base) / prefix_mass);
    base += prefix_mass * c.cdf_below(values[i]);
    prefix_mass *= c.mass(values[i]);
  }
  return encode_coefficients(values);
}

BitString PerturbationFamily::sample(std::uint64_t seed) const {
  UniformSource source(seed);
  if (is_product()) {
    std::vector<std::uint64_t> values(coefficients_.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = coefficients_[i].sample(source);
    return encode_coefficients(values);
  }
  return points_[first_prefix_above(prefix_, draw_as_int(source.next128()))];
}

std::vector<BitString> PerturbationFamily::enumerate_support(std::uint64_t limit) const {
  if (support_count() > limit)
    throw PreconditionError("support has " + support_count().str() + " points, limit is " + std::to_string(limit));
  if (!is_product()) return points_;
  std::vector<std::vector<std::uint64_t>> axes;
  for (const auto& c : coefficients_) axes.push_back(c.support());
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<std::uint64_t> values(axes.size());
  std::vector<BitString> out;
  while (true) {
    for (std::size_t i = 0; i < axes.size(); ++i) values[i] = axes[i][idx[i]];
    out.push_back(encode_coefficients(values));
    std::size_t pos = axes.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < axes[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

bool coefficient_mass_ok(const CoefficientDistribution& dist, unsigned n, const Phi& phi) {
  return pow(dist.max_mass(), n) <= phi.value();
}

MassBoundReport mass_bound_check(const PerturbationFamily& family) {
  MassBoundReport report;
  const Rational phi = family.phi().value();
  switch (family.kind()) {
    case FamilyKind::ExplicitTable: {
      const auto support = family.enumerate_support(~std::uint64_t{0});
      for (const auto& y : support) {
        const Rational m = family.point_mass(y);
        if (m > report.worst_mass) {
          report.worst_mass = m;
          report.worst_point = y;
        }
      }
      report.ok = report.worst_mass <= phi;
      break;
    }
    case FamilyKind::CoefficientProduct: {
      std::vector<std::uint64_t> argmax;
      for (std::size_t i = 0; i < family.coefficients().size(); ++i) {
        const auto& c = family.coefficients()[i];
        argmax.push_back(c.argmax());
        if (!report.worst_coefficient || c.max_mass() > report.worst_mass) {
          report.worst_mass = c.max_mass();
          report.worst_coefficient = i;
        }
      }
      report.worst_point = family.encode_coefficients(argmax);
      report.ok = pow(report.worst_mass, family.n()) <= phi;
      break;
    }
    case FamilyKind::GraphFlip: {
      BitString point;
      Rational joint = 1;
      for (const auto& c : family.coefficients()) {
        point.push_back(c.argmax() != 0);
        joint *= c.max_mass();
      }
      report.worst_point = point;
      report.worst_mass = joint;
      report.ok = joint <= phi;
      break;
    }
  }
  return report;
}

}  // namespace smoothed
