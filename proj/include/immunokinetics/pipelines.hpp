#pragma once

// Whole-model runs driven by a scenario, and the cross-model comparisons
// built on them.

#include <optional>
#include <string>
#include <vector>

#include "immunokinetics/reductions.hpp"
#include "immunokinetics/scenario.hpp"

namespace immunokinetics {

/// Step for a delay run: the largest tau / k not above `hint`.
double dde_step(double tau, double hint);

TimeSeries run_mol(const Scenario& s, std::optional<double> dt = std::nullopt);
/// Columns S, I, R. Constant history (S0, I0, R0) with R0 the initial immune mass.
TimeSeries run_sirs_dde(const Scenario& s, std::optional<double> dt = std::nullopt);
/// Columns S, I, A for the normalized system. Requires d_I = 0; the scenario
/// state is divided by its total population.
TimeSeries run_sis_dde(const Scenario& s, std::optional<double> dt = std::nullopt);

struct ComparisonResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  double witness_t = 0.0;
  double witness_value = 0.0;
  std::string metric;
  std::vector<std::string> notes;
  bool passed = false;
};

/// `threads` > 1 lets the two models of a pair run concurrently.
ComparisonResult compare_m1_vs_sirs_dde(const Scenario& s, unsigned threads = 1);
ComparisonResult compare_m2_vs_oracle(const Scenario& s, unsigned threads = 1);
ComparisonResult compare_m2_vs_sis_dde(const Scenario& s, unsigned threads = 1);
ComparisonResult compare_mol_theta0_vs_m2(const Scenario& s);

/// L1 distance at t_end between an M2 run and the characteristic solution
/// driven by that run's own I/N and B histories.
double m2_oracle_l1_error(const Trajectory& traj, const Scenario& s);

}  // namespace immunokinetics
