#pragma once

#include "smoothed/numeric.hpp"

#include <cstdint>
#include <exception>
#include <limits>

namespace smoothed {

/// Thrown by StepMeter::charge once the configured limit is exceeded.
class BudgetExhausted : public std::exception {
 public:
  const char* what() const noexcept override { return "step budget exhausted"; }
};

/// Machine-independent elementary-step counter shared by all algorithms.
/// Counts are per call; a run that stays within the limit reports the same
/// count as an unlimited run.
class StepMeter {
 public:
  StepMeter() = default;
  explicit StepMeter(std::uint64_t limit) : limit_(limit) {}
  /// Limits at or above 2^64 behave as unlimited.
  static StepMeter with_budget(const BigInt& budget) {
    if (budget >= BigInt(std::numeric_limits<std::uint64_t>::max())) return StepMeter();
    if (budget < 0) return StepMeter(0);
    return StepMeter(budget.convert_to<std::uint64_t>());
  }

  void charge(std::uint64_t steps) {
    if (steps > std::numeric_limits<std::uint64_t>::max() - count_) {
      count_ = std::numeric_limits<std::uint64_t>::max();
    } else {
      count_ += steps;
    }
    if (count_ > limit_) throw BudgetExhausted{};
  }

  std::uint64_t count() const { return count_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t count_ = 0;
  std::uint64_t limit_ = std::numeric_limits<std::uint64_t>::max();
};

}  // namespace smoothed
