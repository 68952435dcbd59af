#pragma once

#include <cstdint>
#include <random>

namespace smoothed {

/// SplitMix64 output function. Used to derive per-trial seeds:
///   trial_seed(master, i) = splitmix64(master + (i + 1) * 0x9E3779B97F4A7C15)
/// which is element i of the SplitMix64 stream started at `master`.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + index * 0x9E3779B97F4A7C15ull);
}

/// Source of 128-bit uniform draws for inverse-CDF sampling. The stream is
/// std::mt19937_64 seeded with the 64-bit seed; a draw is two consecutive
/// outputs, high word first.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next64() { return engine_(); }

  struct Draw128 {
    std::uint64_t hi;
    std::uint64_t lo;
  };
  Draw128 next128() {
    const std::uint64_t hi = engine_();
    const std::uint64_t lo = engine_();
    return {hi, lo};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace smoothed
