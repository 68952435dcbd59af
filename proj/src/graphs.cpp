#include "smoothed/graphs.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace smoothed::graphs {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

const BigInt& two_pow_64() {
  static const BigInt value = pow2(64);
  return value;
}

std::uint64_t flip_threshold(const Rational& flip) {
  const Rational scaled = flip * Rational(two_pow_64());
  if (denominator(scaled) != 1) throw DomainError("flip probability is not a multiple of 2^-64");
  return numerator(scaled).convert_to<std::uint64_t>();
}

Rational keep_power(const Rational& flip, std::size_t pairs) {
  return pow(Rational(1) - flip, static_cast<unsigned>(pairs));
}

}  // namespace

Graph::Graph(unsigned vertices) : n_(vertices), adj_(vertices, 0) {
  if (vertices > kMaxVertices) throw PreconditionError("graphs are limited to 64 vertices");
}

Graph Graph::from_adjacency_string(unsigned vertices, const BitString& bits) {
  if (bits.size() != pair_count(vertices)) throw EncodingError("adjacency string must have C(n,2) bits");
  Graph g(vertices);
  std::size_t pos = 0;
  for (unsigned u = 0; u < vertices; ++u)
    for (unsigned v = u + 1; v < vertices; ++v) g.set_edge(u, v, bits[pos++]);
  return g;
}

Graph Graph::complete(unsigned vertices) {
  Graph g(vertices);
  for (unsigned u = 0; u < vertices; ++u)
    for (unsigned v = u + 1; v < vertices; ++v) g.set_edge(u, v, true);
  return g;
}

Graph Graph::complete_multipartite(unsigned vertices, unsigned parts) {
  if (parts == 0) throw PreconditionError("need at least one part");
  Graph g(vertices);
  for (unsigned u = 0; u < vertices; ++u)
    for (unsigned v = u + 1; v < vertices; ++v) g.set_edge(u, v, u % parts != v % parts);
  return g;
}

void Graph::set_edge(unsigned u, unsigned v, bool present) {
  if (u == v) return;
  const std::uint64_t bu = std::uint64_t{1} << u;
  const std::uint64_t bv = std::uint64_t{1} << v;
  if (present) {
    adj_[u] |= bv;
    adj_[v] |= bu;
  } else {
    adj_[u] &= ~bv;
    adj_[v] &= ~bu;
  }
}

unsigned Graph::degree(unsigned u) const { return static_cast<unsigned>(std::popcount(adj_[u])); }

std::size_t Graph::edge_count() const {
  std::size_t twice = 0;
  for (auto a : adj_) twice += static_cast<std::size_t>(std::popcount(a));
  return twice / 2;
}

BitString Graph::to_adjacency_string() const {
  BitString bits;
  for (unsigned u = 0; u < n_; ++u)
    for (unsigned v = u + 1; v < n_; ++v) bits.push_back(has_edge(u, v));
  return bits;
}

Rational flip_from_phi(const Phi& phi, std::size_t pairs) {
  const Rational value = phi.value();
  if (value <= 0 || value > 1) throw DomainError("phi must lie in (0, 1]");
  if (pairs == 0 || value == 1) return 0;
  if (value * Rational(pow2(static_cast<unsigned>(pairs))) < 1) throw DomainError("phi is below 2^-C(n,2)");

  const Float50 log2_phi =
      boost::multiprecision::log2(Float50(phi.numerator.str())) - Float50(phi.exponent);
  const Float50 eps = Float50(1) - boost::multiprecision::exp2(log2_phi / Float50(pairs));
  const Float50 scaled = boost::multiprecision::ceil(boost::multiprecision::ldexp(eps, 64));
  const Float50 high = boost::multiprecision::floor(boost::multiprecision::ldexp(scaled, -32));
  const Float50 low = scaled - boost::multiprecision::ldexp(high, 32);
  BigInt k = (BigInt(high.convert_to<std::uint64_t>()) << 32) + low.convert_to<std::uint64_t>();
  const BigInt half = pow2(63);
  if (k < 0) k = 0;
  if (k > half) k = half;
  while (k < half && keep_power(Rational(k, two_pow_64()), pairs) > value) ++k;
  return Rational(k, two_pow_64());
}

PerturbedGraphModel make_model(Graph base, Phi phi, PerturbationKind kind) {
  const Rational flip = flip_from_phi(phi, pair_count(base.vertices()));
  return {std::move(base), std::move(phi), flip, kind};
}

PerturbedGraphModel make_model_from_flip(Graph base, double flip, PerturbationKind kind) {
  if (!(flip >= 0.0 && flip <= 0.5)) throw DomainError("flip probability must lie in [0, 1/2]");
  // Nearest multiple of 2^-64.
  const Rational scaled_flip = Rational(flip) * Rational(two_pow_64()) + Rational(1, 2);
  const Rational eps(numerator(scaled_flip) / denominator(scaled_flip), two_pow_64());
  const std::size_t pairs = pair_count(base.vertices());
  const unsigned grid = static_cast<unsigned>(pairs) + 16;
  const Rational keep = keep_power(eps, pairs);
  const Rational scaled = keep * Rational(pow2(grid));
  BigInt num = numerator(scaled) / denominator(scaled);
  if (Rational(num) < scaled) ++num;
  return {std::move(base), Phi{num, grid}, eps, kind};
}

Graph perturb(const PerturbedGraphModel& model, std::uint64_t seed) {
  const std::uint64_t threshold = flip_threshold(model.flip);
  UniformSource source(seed);
  Graph g = model.base;
  const unsigned n = g.vertices();
  for (unsigned u = 0; u < n; ++u) {
    for (unsigned v = u + 1; v < n; ++v) {
      if (source.next64() >= threshold) continue;
      if (model.kind == PerturbationKind::Flip) g.toggle_edge(u, v);
      else g.set_edge(u, v, true);
    }
  }
  return g;
}

PerturbationFamily graph_family(const PerturbedGraphModel& model) {
  if (model.kind != PerturbationKind::Flip) throw UnsupportedError("graph_family covers the flip model only");
  const unsigned n = model.base.vertices();
  return PerturbationFamily::graph_flip(n, model.base.to_adjacency_string(), model.flip, model.phi,
                                        std::max(default_phi_exponent_bound(n), model.phi.exponent));
}

std::optional<std::vector<unsigned>> find_clique(const Graph& g, unsigned size, StepMeter& meter) {
  const unsigned n = g.vertices();
  if (size == 0) return std::vector<unsigned>{};
  if (size > n) return std::nullopt;
  std::vector<unsigned> pick(size);
  std::iota(pick.begin(), pick.end(), 0u);
  while (true) {
    meter.charge(1);
    std::uint64_t mask = 0;
    for (auto v : pick) mask |= std::uint64_t{1} << v;
    bool clique = true;
    for (auto v : pick) {
      const std::uint64_t others = mask & ~(std::uint64_t{1} << v);
      if ((g.neighbors(v) & others) != others) {
        clique = false;
        break;
      }
    }
    if (clique) return pick;
    // Next combination in lexicographic order.
    int i = static_cast<int>(size) - 1;
    while (i >= 0 && pick[static_cast<unsigned>(i)] == n - size + static_cast<unsigned>(i)) --i;
    if (i < 0) return std::nullopt;
    ++pick[static_cast<unsigned>(i)];
    for (unsigned j = static_cast<unsigned>(i) + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
}

std::optional<std::vector<unsigned>> find_clique(const Graph& g, unsigned size) {
  StepMeter meter;
  return find_clique(g, size, meter);
}

namespace {

class Backtracker {
 public:
  Backtracker(const Graph& g, unsigned k, StepMeter& meter) : g_(g), k_(k), meter_(meter), color_(g.vertices(), -1) {
    order_.resize(g.vertices());
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](unsigned a, unsigned b) { return g.degree(a) > g.degree(b); });
  }

  bool run() { return extend(0, 0); }

 private:
  bool extend(std::size_t pos, unsigned used) {
    meter_.charge(1);
    if (pos == order_.size()) return true;
    const unsigned v = order_[pos];
    std::uint64_t forbidden = 0;
    for (unsigned u = 0; u < g_.vertices(); ++u)
      if (g_.has_edge(u, v) && color_[u] >= 0) forbidden |= std::uint64_t{1} << color_[u];
    // Colors beyond the first unused one are symmetric to it.
    const unsigned limit = std::min(k_, used + 1);
    for (unsigned c = 0; c < limit; ++c) {
      if ((forbidden >> c) & 1u) continue;
      color_[v] = static_cast<int>(c);
      if (extend(pos + 1, std::max(used, c + 1))) return true;
      color_[v] = -1;
    }
    return false;
  }

  const Graph& g_;
  unsigned k_;
  StepMeter& meter_;
  std::vector<int> color_;
  std::vector<unsigned> order_;
};

}  // namespace

ColorDecision color_decide(const Graph& g, unsigned k, StepMeter& meter) {
  if (k == 0) throw PreconditionError("color_decide: k must be at least 1");
  if (k > 63) throw PreconditionError("color_decide: k must be below 64");
  const std::uint64_t before = meter.count();
  ColorDecision out;
  if (find_clique(g, k + 1, meter)) {
    out.clique_found = true;
    out.answer = false;
  } else {
    out.answer = Backtracker(g, k, meter).run();
  }
  out.steps = meter.count() - before;
  return out;
}

ColorDecision color_decide(const Graph& g, unsigned k) {
  StepMeter meter;
  return color_decide(g, k, meter);
}

double noclique_bound(unsigned n, unsigned k, double flip) {
  const double edges = static_cast<double>(k + 1) * k / 2.0;
  return std::pow(1.0 - std::pow(flip, edges), static_cast<double>(n) / (k + 1));
}

namespace {

bool clique_search(const Graph& g, std::uint64_t candidates, unsigned needed) {
  if (needed == 0) return true;
  if (static_cast<unsigned>(std::popcount(candidates)) < needed) return false;
  while (candidates != 0) {
    const unsigned v = static_cast<unsigned>(std::countr_zero(candidates));
    candidates &= candidates - 1;
    if (clique_search(g, candidates & g.neighbors(v), needed - 1)) return true;
  }
  return false;
}

}  // namespace

bool has_clique_bitset(const Graph& g, unsigned size) {
  const unsigned n = g.vertices();
  const std::uint64_t all = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  return clique_search(g, all, size);
}

unsigned chromatic_number(const Graph& g) {
  const unsigned n = g.vertices();
  if (n > 20) throw PreconditionError("chromatic_number: at most 20 vertices");
  if (n == 0) return 0;
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<std::uint8_t> independent(std::size_t{full} + 1, 0);
  independent[0] = 1;
  for (std::uint32_t s = 1; s <= full; ++s) {
    const unsigned v = static_cast<unsigned>(std::countr_zero(s));
    const std::uint32_t rest = s & (s - 1);
    independent[s] = independent[rest] && (g.neighbors(v) & rest) == 0;
  }
  std::vector<std::uint8_t> colors(std::size_t{full} + 1, 0xff);
  colors[0] = 0;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const std::uint32_t low = mask & (~mask + 1);
    const std::uint32_t rest = mask ^ low;
    // Independent sets containing the lowest vertex of mask.
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const std::uint32_t s = sub | low;
      if (independent[s]) colors[mask] = std::min<std::uint8_t>(colors[mask], colors[mask ^ s] + 1);
      if (sub == 0) break;
    }
  }
  return colors[full];
}

}  // namespace smoothed::graphs
