#include "immunokinetics/equilibria.hpp"

#include <cmath>
#include <sstream>

#include "immunokinetics/equilibrium_search.hpp"
#include "immunokinetics/errors.hpp"

namespace immunokinetics {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::globally_stable: return "globally_stable";
    case Classification::locally_stable: return "locally_stable";
    case Classification::unstable: return "unstable";
    case Classification::threshold_inconclusive: return "threshold_inconclusive";
  }
  return "unknown";
}

double find_n_star(const BirthFunction& b, double d, double n_max) {
  if (!(d > 0.0)) throw ConfigError("no equilibrium: d must be > 0");
  const auto root = locate_birth_balance(b, d, n_max);
  if (!root) {
    std::ostringstream msg;
    msg << "no equilibrium: b(N) - dN has no sign change up to N = " << n_max;
    throw NoEquilibriumError(msg.str());
  }
  return *root;
}

double compute_r0(const ModelParameters& p) { return p.beta / (p.gamma + p.d + p.d_I); }

double compute_r0_tilde(const ModelParameters& p) { return p.beta / (p.gamma + p.d); }

Classification classify_dfe(const ModelParameters& p) {
  const double r0 = compute_r0(p);
  if (compute_r0_tilde(p) < 1.0) return Classification::globally_stable;
  if (std::abs(r0 - 1.0) <= 1e-12) return Classification::threshold_inconclusive;
  if (r0 < 1.0) return Classification::locally_stable;
  return Classification::unstable;
}

double linear_growth_rate(const ModelParameters& p) {
  return p.beta - p.gamma - p.d - p.d_I;
}

std::vector<double> stationary_r_profile(const ModelParameters& p, const DecayFunction& g,
                                         const ImmunityGrid& grid, double I_star) {
  if (I_star != 0.0) throw DomainError("endemic analysis out of scope");
  std::vector<double> r(grid.size(), 0.0);
  // Stationary balance per cell with I = 0: no boosting, so
  // 0 = flux in from above - flux out below - d r. Inflow at z_max is gamma I = 0.
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double above = (i + 1 < r.size()) ? g(grid.edge(i + 1)) * r[i + 1] : p.gamma * I_star;
    const double residual = above - g(grid.edge(i)) * r[i] - p.d * grid.width(i) * r[i];
    if (residual != 0.0) throw SimulationError("stationary residual is not zero");
  }
  return r;
}

EquilibriumReport equilibrium_report(const ModelParameters& p, const BirthFunction& b) {
  p.validate();
  EquilibriumReport rep;
  rep.N_star = find_n_star(b, p.d);
  rep.S_star = rep.N_star;
  rep.R0 = compute_r0(p);
  rep.R0_tilde = compute_r0_tilde(p);
  rep.classification = classify_dfe(p);
  rep.growth_rate = linear_growth_rate(p);
  return rep;
}

}  // namespace immunokinetics
