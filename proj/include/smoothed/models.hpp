#pragma once

// Coefficient perturbation models used by the experiments: phi = rho / N
// with N = 2^(n W), realized per coefficient by a distribution whose
// largest point mass r satisfies r^n <= phi.

#include "smoothed/family.hpp"

#include <cstdint>
#include <string>

namespace smoothed {

enum class CoefficientModel {
  /// Uniform on a dyadic window of 2^m values, m minimal with 2^(-m n) <= phi.
  Window,
  /// As many values as possible at the largest dyadic mass r (grid 2^-(W+16))
  /// with r^n <= phi, remainder on one extra value; the most concentrated
  /// phi-bounded adversary at that grid.
  Peak,
};

CoefficientModel parse_coefficient_model(const std::string& name);
const char* to_string(CoefficientModel model);

/// Window exponent m used by CoefficientModel::Window.
unsigned window_log2_width(unsigned n, unsigned bit_width, const Phi& phi);

/// The adversary's placement of each coefficient's mass is drawn from
/// `adversary_seed`.
PerturbationFamily coefficient_family(unsigned n, unsigned bit_width, const BigInt& rho,
                                      std::uint64_t adversary_seed, CoefficientModel model = CoefficientModel::Window);

/// Exponent bound for coefficient families: large enough for phi = 1/N.
unsigned coefficient_exponent_bound(unsigned n, unsigned bit_width);

}  // namespace smoothed
