#include "smoothed/binopt.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace smoothed::binopt {

namespace {

constexpr std::uint64_t kUnreachable = std::numeric_limits<std::uint64_t>::max();

std::uint64_t low_mask(unsigned n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

// Counting states of the suffix DP. For AllSubsets the state is whether a
// one is still required; for CardinalityExact it is the number of ones
// still to place. State 0 is the only accepting state at the end.
struct CountingStates {
  unsigned count;
  unsigned start;
  bool cardinality;

  // Returns count when the transition is invalid.
  unsigned next(unsigned j, bool take) const {
    if (cardinality) {
      if (!take) return j;
      return j == 0 ? count : j - 1;
    }
    return take ? 0 : j;
  }
};

std::optional<Solution> table_solve(const SolutionStructure& structure, const std::vector<std::uint64_t>& v,
                                    std::uint64_t s, StepMeter& meter) {
  const unsigned n = structure.n();
  const CountingStates states = structure.kind() == SolutionStructure::Kind::CardinalityExact
                                    ? CountingStates{structure.cardinality() + 1, structure.cardinality(), true}
                                    : CountingStates{2, 1, false};
  std::uint64_t total = 0;
  for (auto c : v) total += c;
  const std::uint64_t cap = std::min(s, total);
  const std::size_t width = static_cast<std::size_t>(cap) + 1;

  // min_sum[i][j]: smallest reachable suffix sum from position i in state j.
  std::vector<std::vector<std::uint64_t>> min_sum(n + 1, std::vector<std::uint64_t>(states.count, kUnreachable));
  std::vector<std::vector<std::uint8_t>> next_rows(states.count, std::vector<std::uint8_t>(width, 0));
  std::vector<std::vector<std::uint8_t>> rows = next_rows;

  for (unsigned j = 0; j < states.count; ++j) {
    meter.charge(width);
    if (j == 0) {
      next_rows[j][0] = 1;
      min_sum[n][j] = 0;
    }
  }
  for (unsigned i = n; i-- > 0;) {
    const std::uint64_t vi = v[i];
    for (unsigned j = 0; j < states.count; ++j) {
      meter.charge(width);
      auto& row = rows[j];
      const auto& skip = next_rows[states.next(j, false)];
      const unsigned jt = states.next(j, true);
      const std::vector<std::uint8_t>* take = jt < states.count ? &next_rows[jt] : nullptr;
      std::uint64_t best = kUnreachable;
      for (std::size_t c = 0; c < width; ++c) {
        std::uint8_t r = skip[c];
        if (!r && take != nullptr && c >= vi) r = (*take)[c - vi];
        row[c] = r;
        if (r && best == kUnreachable) best = c;
      }
      min_sum[i][j] = best;
    }
    std::swap(rows, next_rows);
  }

  if (min_sum[0][states.start] == kUnreachable) return std::nullopt;
  Solution x;
  std::uint64_t spent = 0;
  unsigned j = states.start;
  for (unsigned i = 0; i < n; ++i) {
    const unsigned jt = states.next(j, true);
    const bool take = jt < states.count && spent + v[i] <= s && min_sum[i + 1][jt] != kUnreachable &&
                      min_sum[i + 1][jt] <= s - spent - v[i];
    x.mask <<= 1;
    if (take) {
      x.mask |= 1u;
      spent += v[i];
      j = jt;
    } else {
      j = states.next(j, false);
    }
  }
  return x;
}

}  // namespace

Solution parse_solution(std::string_view bits) {
  if (bits.empty() || bits.size() > kMaxVariables) throw EncodingError("solution must have 1..62 bits");
  Solution x;
  for (char c : bits) {
    if (c != '0' && c != '1') throw EncodingError("solution contains '" + std::string(1, c) + "'");
    x.mask = (x.mask << 1) | (c == '1' ? 1u : 0u);
  }
  return x;
}

std::string format_solution(const Solution& x, unsigned n) {
  std::string s(n, '0');
  for (unsigned i = 0; i < n; ++i)
    if (x.get(n, i)) s[i] = '1';
  return s;
}

SolutionStructure SolutionStructure::all_subsets(unsigned n) {
  if (n == 0 || n > kMaxVariables) throw PreconditionError("structure size must be in [1, 62]");
  return SolutionStructure(Kind::AllSubsets, n);
}

SolutionStructure SolutionStructure::cardinality_exact(unsigned n, unsigned k) {
  if (n == 0 || n > kMaxVariables) throw PreconditionError("structure size must be in [1, 62]");
  if (k > n) throw PreconditionError("cardinality exceeds n");
  SolutionStructure s(Kind::CardinalityExact, n);
  s.k_ = k;
  return s;
}

SolutionStructure SolutionStructure::explicit_list(unsigned n, std::vector<Solution> members) {
  if (n == 0 || n > kMaxVariables) throw PreconditionError("structure size must be in [1, 62]");
  for (const auto& x : members)
    if ((x.mask & ~low_mask(n)) != 0) throw PreconditionError("list entry longer than n");
  std::sort(members.begin(), members.end(), std::greater<>());
  if (std::adjacent_find(members.begin(), members.end()) != members.end())
    throw PreconditionError("list entries must be distinct");
  SolutionStructure s(Kind::ExplicitList, n);
  s.list_ = std::move(members);
  return s;
}

bool SolutionStructure::contains(const Solution& x) const {
  if ((x.mask & ~low_mask(n_)) != 0) return false;
  switch (kind_) {
    case Kind::AllSubsets: return x.mask != 0;
    case Kind::CardinalityExact: return static_cast<unsigned>(std::popcount(x.mask)) == k_;
    case Kind::ExplicitList:
      return std::binary_search(list_.begin(), list_.end(), x, std::greater<>());
  }
  return false;
}

std::vector<Solution> SolutionStructure::enumerate() const {
  if (kind_ == Kind::ExplicitList) return {list_.rbegin(), list_.rend()};
  if (n_ > kMaxEnumerableVariables)
    throw PreconditionError("structure with n = " + std::to_string(n_) + " is too large to enumerate");
  std::vector<Solution> out;
  const std::uint64_t end = std::uint64_t{1} << n_;
  if (kind_ == Kind::AllSubsets) {
    out.reserve(end - 1);
    for (std::uint64_t m = 1; m < end; ++m) out.push_back({m});
    return out;
  }
  if (k_ == 0) return {Solution{0}};
  // Gosper's hack visits k-subsets in increasing order.
  for (std::uint64_t m = (std::uint64_t{1} << k_) - 1; m < end;) {
    out.push_back({m});
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return out;
}

std::string SolutionStructure::describe() const {
  switch (kind_) {
    case Kind::AllSubsets: return "subsets";
    case Kind::CardinalityExact: return "card:" + std::to_string(k_);
    case Kind::ExplicitList: return "list:" + std::to_string(list_.size());
  }
  return "?";
}

void BinDecisionInstance::validate() const {
  if (bit_width == 0 || bit_width > 62) throw PreconditionError("bit width must be in [1, 62]");
  if (w.size() != structure.n()) throw PreconditionError("coefficient count differs from n");
  if (bit_width + ceil_log2(structure.n()) > 62) throw PreconditionError("n * 2^W overflows 64-bit costs");
  for (auto c : w)
    if ((c >> bit_width) != 0) throw PreconditionError("coefficient exceeds 2^W - 1");
}

std::uint64_t cost(const std::vector<std::uint64_t>& w, const Solution& x) {
  const unsigned n = static_cast<unsigned>(w.size());
  std::uint64_t total = 0;
  for (unsigned i = 0; i < n; ++i)
    if (x.get(n, i)) total += w[i];
  return total;
}

std::uint64_t truncate(std::uint64_t a, unsigned b, unsigned bit_width) {
  if (b > bit_width) throw PreconditionError("truncate: b exceeds the bit width");
  const unsigned shift = bit_width - b;
  if (shift >= 64) return 0;
  return (a >> shift) << shift;
}

std::optional<Solution> dp_solve(const SolutionStructure& structure, const std::vector<std::uint64_t>& v,
                                 std::uint64_t s, StepMeter& meter) {
  if (v.size() != structure.n()) throw PreconditionError("coefficient count differs from n");
  if (structure.kind() == SolutionStructure::Kind::ExplicitList) {
    for (const auto& x : structure.members()) {
      meter.charge(1);
      if (cost(v, x) <= s) return x;
    }
    return std::nullopt;
  }
  return table_solve(structure, v, s, meter);
}

unsigned default_start_bits(unsigned n) { return ceil_log2(n) + 1; }

SolveTrace adaptive_solve(const BinDecisionInstance& instance, unsigned start_bits, StepMeter& meter) {
  instance.validate();
  if (start_bits == 0) throw PreconditionError("adaptive_solve: start bits must be positive");
  const unsigned width = instance.bit_width;
  const unsigned n = instance.n();
  const std::uint64_t before = meter.count();
  SolveTrace trace;
  std::vector<std::uint64_t> scaled(n);
  for (unsigned b = std::min(start_bits, width);; ++b) {
    const unsigned shift = width - b;
    for (unsigned j = 0; j < n; ++j) scaled[j] = instance.w[j] >> shift;
    const auto candidate = dp_solve(instance.structure, scaled, instance.threshold >> shift, meter);
    trace.bits_revealed = b;
    if (!candidate) {
      // Truncation never increases w^T x, so no true solution exists.
      trace.answer = false;
      break;
    }
    meter.charge(n);
    if (cost(instance.w, *candidate) <= instance.threshold) {
      trace.answer = true;
      trace.witness = candidate;
      break;
    }
    if (b == width) throw std::logic_error("adaptive_solve: exact problem returned an infeasible witness");
  }
  trace.steps = meter.count() - before;
  return trace;
}

SolveTrace adaptive_solve(const BinDecisionInstance& instance, unsigned start_bits) {
  StepMeter meter;
  return adaptive_solve(instance, start_bits, meter);
}

SolveTrace adaptive_solve(const BinDecisionInstance& instance) {
  return adaptive_solve(instance, default_start_bits(instance.n()));
}

Decision brute_force_decide(const BinDecisionInstance& instance) {
  instance.validate();
  const auto members = instance.structure.enumerate();
  for (auto it = members.rbegin(); it != members.rend(); ++it) {
    if (cost(instance.w, *it) <= instance.threshold) return {true, *it};
  }
  return {false, std::nullopt};
}

}  // namespace smoothed::binopt
