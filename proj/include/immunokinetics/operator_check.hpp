#pragma once

// Nonlinear right-hand side Q of the abstract evolution equation on
// X = R x R x L1, its closed-form directional derivative DQ(x; w), and the
// finite-difference comparison between the two.

#include <random>
#include <span>
#include <vector>

#include "immunokinetics/kernel_transfer.hpp"
#include "immunokinetics/model.hpp"

namespace immunokinetics {

struct AbstractPoint {
  double x1 = 0.0;         // S slot
  double x2 = 0.0;         // I slot
  std::vector<double> x3;  // r slot, cell averages

  /// x1 + x2 + integral of x3.
  double hat(const ImmunityGrid& grid) const;
};

/// |x1| + |x2| + integral of |x3|.
double x_norm(const AbstractPoint& x, const ImmunityGrid& grid);

/// a + s * b, componentwise.
AbstractPoint axpy(const AbstractPoint& a, double s, const AbstractPoint& b);

/// Smooth random grid point: a few cosine modes on top of a constant level.
/// With `positive` every slot is positive; otherwise entries take both signs.
AbstractPoint random_point(const ImmunityGrid& grid, std::mt19937_64& rng, bool positive);

class AbstractOperator {
 public:
  AbstractOperator(ModelParameters params, BirthFunction birth, const BoostingKernel& kernel,
                   ImmunityGrid grid);

  const ImmunityGrid& grid() const { return grid_; }

  AbstractPoint eval_q(const AbstractPoint& x) const;
  AbstractPoint eval_dq(const AbstractPoint& x, const AbstractPoint& w) const;

  /// (Q(x + h w) - Q(x)) / h, or the centered quotient when `centered`.
  AbstractPoint fd_directional(const AbstractPoint& x, const AbstractPoint& w, double h,
                               bool centered = false) const;

  /// Least-squares slope of log ||FD(h) - DQ|| against log h.
  double fd_slope(const AbstractPoint& x, const AbstractPoint& w, std::span<const double> hs,
                  bool centered = false) const;

 private:
  void check_point(const AbstractPoint& x) const;

  ModelParameters params_;
  BirthFunction birth_;
  ImmunityGrid grid_;
  BoostingTransfer transfer_;
};

}  // namespace immunokinetics
