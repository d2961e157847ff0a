#pragma once

// Exact immune density for the boost-to-maximum model, traced along
// characteristics. Used as a reference solution for the finite-volume scheme.

#include <functional>
#include <optional>

#include "immunokinetics/model.hpp"
#include "immunokinetics/numerics.hpp"

namespace immunokinetics {

struct CharacteristicInputs {
  PiecewiseCubic infected_fraction;  // I(t) / N(t)
  PiecewiseCubic inflow;             // B(t) = gamma I + boost hazard * R
  double d = 0.0;
  double boost_rate = 0.0;  // beta * boost_contact_multiplier
  DecayFunction g = DecayFunction::constant(1.0);
  double z_min = 0.0;
  double z_max = 1.0;
  std::function<double(double)> psi;  // initial density

  /// Loss rate along a characteristic: d - g'(z) + boost hazard.
  double hazard(double t, double z) const;
};

/// Histories interpolated from a recorded PDE run (I/N and B diagnostics).
CharacteristicInputs characteristic_inputs_from(const Trajectory& traj,
                                                const ModelParameters& params,
                                                const DecayFunction& g,
                                                std::function<double(double)> psi);

/// Time at which the cohort found at level z at time t left z_max.
/// Returns nullopt when that cohort was already immune at time 0.
std::optional<double> backtrace_emission_time(double t, double z, const DecayFunction& g,
                                              double z_min, double z_max);

double exact_r_m2(double t, double z, const CharacteristicInputs& inputs);

/// Same two-branch solution without boosting: B = gamma I and hazard d - g'.
double no_boost_exact(double t, double z, const PiecewiseCubic& infected,
                      const std::function<double(double)>& psi, const ModelParameters& params,
                      const DecayFunction& g);

}  // namespace immunokinetics
