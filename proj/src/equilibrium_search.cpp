#include "immunokinetics/equilibrium_search.hpp"

#include <cmath>

namespace immunokinetics {

std::optional<double> locate_birth_balance(const BirthFunction& b, double d, double n_max,
                                           double n_min) {
  auto excess = [&](double N) { return b(N) - d * N; };

  double lo = 1.0;
  double hi = 1.0;
  const double f1 = excess(1.0);
  if (f1 == 0.0) return 1.0;
  if (f1 > 0.0) {
    while (excess(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > n_max) return std::nullopt;
    }
  } else {
    while (!(excess(lo) > 0.0)) {
      hi = lo;
      lo *= 0.5;
      if (lo < n_min) return std::nullopt;
    }
  }
  return bisect(excess, lo, hi, 1e-15 * hi);
}

}  // namespace immunokinetics
