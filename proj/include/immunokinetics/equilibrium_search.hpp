#pragma once

#include <optional>

#include "immunokinetics/model.hpp"

namespace immunokinetics {

/// Positive root of b(N) = dN located by geometric bracket expansion from
/// N = 1 followed by bisection. Returns nullopt when no sign change is found
/// in [n_min, n_max].
std::optional<double> locate_birth_balance(const BirthFunction& b, double d,
                                           double n_max = 1e15, double n_min = 1e-12);

}  // namespace immunokinetics
