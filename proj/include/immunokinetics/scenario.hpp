#pragma once

// Scenario files and the initial data built from them.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "immunokinetics/reductions.hpp"
#include "immunokinetics/simulator.hpp"

namespace immunokinetics {

enum class InitialDensity { zero, uniform, bump, history };

struct Scenario {
  ModelParameters params;
  BirthFunction birth = BirthFunction::beverton_holt(1.0, 1.0);
  DecayFunction decay = DecayFunction::constant(1.0);
  BoostingKernel kernel = BoostingKernel::no_boost(0.0, 1.0);
  double theta = 0.0;  // R_C boost split of the three-class chain
  std::size_t grid_cells = 200;

  double S0 = 0.0;
  double I0 = 0.0;
  std::optional<double> N0;   // when set, S0 = N0 - I0 - initial immune mass
  InitialDensity density = InitialDensity::zero;
  double R0_mass = 0.0;       // total immune mass for uniform and bump
  double bump_center = 0.5;   // fraction of [z_min, z_max]
  double bump_width = 0.15;   // fraction of [z_min, z_max]

  double t_end = 100.0;
  std::optional<double> dt;
  std::size_t output_stride = 1;
  std::uint64_t seed = 0;
};

/// Parses and validates a scenario. Unknown sections or keys, missing
/// required keys and out-of-range values throw ConfigError naming the key.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Equilibrium immune density for constant infected history I0 in a
/// population of constant size N, without boosting:
/// r(z) = gamma I0 exp(-d a(z)) / g(z), a(z) the time needed to decay from z_max to z.
std::function<double(double)> no_boost_history_density(const ModelParameters& p,
                                                       const DecayFunction& g, double I0);

/// Same for boost-to-maximum with hazard lambda = mult beta I0 / N:
/// r(z) = B exp(-(d + lambda) a(z)) / g(z) with B = gamma I0 + lambda R.
std::function<double(double)> m2_history_density(const ModelParameters& p,
                                                  const DecayFunction& g, double I0, double N);

/// Initial immune density of a scenario as a function of z.
std::function<double(double)> initial_density(const Scenario& s, ModelTag model);

/// Finite-volume configuration for the structured models.
SimulationConfig make_pde_config(const Scenario& s, ModelTag model,
                                 std::optional<std::size_t> cells = std::nullopt);

/// Initial state of the three-class chain: immune mass of the top, middle
/// and bottom thirds of the immunity range.
MolState make_mol_initial(const Scenario& s);
MolRates make_mol_rates(const Scenario& s);

}  // namespace immunokinetics
