#pragma once

// Disease-free equilibrium and threshold quantities.

#include <string>
#include <vector>

#include "immunokinetics/model.hpp"

namespace immunokinetics {

enum class Classification { globally_stable, locally_stable, unstable, threshold_inconclusive };

std::string to_string(Classification c);

struct EquilibriumReport {
  double N_star = 0.0;
  double S_star = 0.0;
  double R0 = 0.0;
  double R0_tilde = 0.0;
  Classification classification = Classification::threshold_inconclusive;
  double growth_rate = 0.0;
};

/// Positive root of b(N) = d N. Throws NoEquilibriumError if none is found
/// below n_max.
double find_n_star(const BirthFunction& b, double d, double n_max = 1e15);

double compute_r0(const ModelParameters& p);
double compute_r0_tilde(const ModelParameters& p);
Classification classify_dfe(const ModelParameters& p);

/// Linearized growth rate of I at the DFE: beta - gamma - d - d_I.
double linear_growth_rate(const ModelParameters& p);

/// Stationary immune density for a given infected level. Only I* = 0 is
/// supported, where the profile vanishes; other values throw DomainError.
std::vector<double> stationary_r_profile(const ModelParameters& p, const DecayFunction& g,
                                         const ImmunityGrid& grid, double I_star = 0.0);

EquilibriumReport equilibrium_report(const ModelParameters& p, const BirthFunction& b);

}  // namespace immunokinetics
