#pragma once

#include <span>
#include <vector>

#include "immunokinetics/model.hpp"

namespace immunokinetics {

/// Boosting kernel discretized on an immunity grid.
///
/// A boost from cell j starts at the cell center. Its mass is split into the
/// part that stays in cell j (c1), the continuous part spread over the cells
/// above (c0 p0), and the atom at z_max (c_max). Everything that ends in the
/// top cell, atoms included, is reported as boundary mass so the transport
/// scheme can feed it through the inflow flux at z_max.
class BoostingTransfer {
 public:
  BoostingTransfer(const BoostingKernel& kernel, const ImmunityGrid& grid);

  std::size_t size() const { return stay_.size(); }
  double stay(std::size_t j) const { return stay_[j]; }

  /// Density gained per unit hazard in every cell below the top cell.
  /// gain[top] is set to 0.
  void interior_gain(std::span<const double> r, std::span<double> gain) const;

  /// Mass per unit hazard that arrives in the top cell, from any source cell.
  double boundary_mass(std::span<const double> r) const;

  /// Full kernel integral: (K r)_i, the cell average of ∫ p(z, v) r(v) dv.
  std::vector<double> apply(std::span<const double> r) const;

 private:
  std::vector<double> widths_;
  std::vector<double> stay_;
  std::vector<double> to_top_;   // c_max_j + continuous mass j -> top cell
  std::vector<double> lower_;    // packed rows i < top: W_ij for j <= i
  bool has_continuous_ = false;
};

}  // namespace immunokinetics
