#pragma once

// Errorless heuristic schemes built from step-counted decision algorithms,
// and the doubling construction that turns a scheme back into an
// algorithm that always answers.

#include "smoothed/steps.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace smoothed::scheme {

/// A deterministic decision algorithm that charges its elementary steps to
/// the meter. Returns the accept/reject answer.
template <class Input>
using Decider = std::function<bool(const Input&, StepMeter&)>;

enum class Verdict { Accept, Reject, Bottom };

const char* to_string(Verdict v);

struct BudgetedOutcome {
  Verdict result = Verdict::Bottom;
  BigInt steps_used;
  Rational delta;  // failure budget the outcome was produced for; 0 when not applicable
};

template <class Input>
using Scheme = std::function<BudgetedOutcome(const Input&, const Rational& delta)>;

/// Runs `algorithm` for at most `budget` steps. Exhausting the budget yields
/// Bottom; a run that needs exactly `budget` steps still answers.
template <class Input>
BudgetedOutcome run_budgeted(const Decider<Input>& algorithm, const Input& input, const BigInt& budget) {
  StepMeter meter = StepMeter::with_budget(budget);
  BudgetedOutcome out;
  try {
    const bool answer = algorithm(input, meter);
    out.result = answer ? Verdict::Accept : Verdict::Reject;
    out.steps_used = meter.count();
  } catch (const BudgetExhausted&) {
    out.result = Verdict::Bottom;
    out.steps_used = budget;
  }
  return out;
}

/// Parameters of the tail-bound scheme: budget(delta) = ceil((n N phi / delta)^m)
/// for exponent eps = 1/m.
struct SchemeParameters {
  unsigned exponent_inverse = 1;  // m
  unsigned n = 1;
  BigInt support_size;  // N
  Rational phi;
};

/// ceil((n N phi / delta)^m), exact.
BigInt scheme_budget(const SchemeParameters& params, const Rational& delta);

template <class Input>
Scheme<Input> make_scheme(Decider<Input> algorithm, SchemeParameters params) {
  if (params.exponent_inverse == 0) throw PreconditionError("make_scheme: eps = 1/m needs m >= 1");
  return [algorithm = std::move(algorithm), params = std::move(params)](const Input& input, const Rational& delta) {
    if (delta <= 0 || delta >= 1) throw PreconditionError("make_scheme: delta must lie in (0, 1)");
    BudgetedOutcome out = run_budgeted(algorithm, input, scheme_budget(params, delta));
    out.delta = delta;
    return out;
  };
}

struct IteratedRun {
  bool answer = false;
  unsigned iterations = 0;
  BigInt total_steps;
  std::vector<BigInt> iteration_costs;
};

/// Runs the scheme with delta = 1/2, 1/4, ... until it answers.
template <class Input>
IteratedRun run_iterated(const Scheme<Input>& scheme, const Input& input, unsigned max_iterations = 256) {
  IteratedRun run;
  Rational delta(1, 2);
  for (unsigned i = 1; i <= max_iterations; ++i, delta /= 2) {
    const BudgetedOutcome out = scheme(input, delta);
    run.iterations = i;
    run.iteration_costs.push_back(out.steps_used);
    run.total_steps += out.steps_used;
    if (out.result != Verdict::Bottom) {
      run.answer = out.result == Verdict::Accept;
      return run;
    }
  }
  throw std::runtime_error("scheme did not answer within the iteration limit");
}

/// The scheme viewed as an ordinary algorithm; the cost of every iteration
/// is charged to the meter.
template <class Input>
Decider<Input> scheme_to_algorithm(Scheme<Input> scheme, unsigned max_iterations = 256) {
  return [scheme = std::move(scheme), max_iterations](const Input& input, StepMeter& meter) {
    Rational delta(1, 2);
    for (unsigned i = 1; i <= max_iterations; ++i, delta /= 2) {
      const BudgetedOutcome out = scheme(input, delta);
      meter.charge(out.steps_used >= BigInt(std::numeric_limits<std::uint64_t>::max())
                       ? std::numeric_limits<std::uint64_t>::max()
                       : out.steps_used.template convert_to<std::uint64_t>());
      if (out.result != Verdict::Bottom) return out.result == Verdict::Accept;
    }
    throw std::runtime_error("scheme did not answer within the iteration limit");
  };
}

}  // namespace smoothed::scheme
