#pragma once

// Explicit upwind finite-volume solver for the structured SIRS model.
//
// Cells are indexed from z_min upward. Immunity decays toward z_min, so the
// upwind value at every edge is the cell above it. The flux through the
// bottom edge is the immunity-loss flux that re-enters S; the flux through
// the top edge is the recovery plus boost-to-maximum inflow B(t).

#include <optional>
#include <vector>

#include "immunokinetics/kernel_transfer.hpp"
#include "immunokinetics/model.hpp"

namespace immunokinetics {

struct SimulationConfig {
  ModelParameters params;
  BirthFunction birth;
  DecayFunction decay;
  BoostingKernel kernel;
  ImmunityGrid grid;
  std::optional<double> dt;  // nullopt: CFL-limited automatic step
  double t_end = 0.0;
  State initial;
  ModelTag model = ModelTag::M1;
  std::size_t output_stride = 1;
};

/// Largest step for which every explicit update coefficient stays nonnegative.
double cfl_dt(const ImmunityGrid& grid, const DecayFunction& g, const ModelParameters& params);

struct FluxDiagnostics {
  double Lambda = 0.0;
  double B = 0.0;
};

/// Precomputed operator for repeated steps on one configuration.
class PdeStepper {
 public:
  explicit PdeStepper(const SimulationConfig& cfg);

  double cfl_limit() const { return cfl_; }
  FluxDiagnostics diagnostics(const State& s) const;

  /// One explicit Euler step of size dt, in place.
  void step(State& s, double dt);

 private:
  ModelParameters params_;
  BirthFunction birth_;
  ImmunityGrid grid_;
  BoostingTransfer transfer_;
  std::vector<double> g_edge_;
  double cfl_ = 0.0;
  double extinction_floor_ = 0.0;
  std::vector<double> gain_;
  std::vector<double> next_;
};

/// Kernel actually used for a configuration: the configured one for M1,
/// boost-to-maximum for M2.
BoostingKernel effective_kernel(const SimulationConfig& cfg);

State step_m1(const State& state, const SimulationConfig& cfg, double dt);

Trajectory simulate(const SimulationConfig& cfg);

struct ConservationResidual {
  double immune = 0.0;  // max |R' - (gamma I - Lambda - d R)|
  double total = 0.0;   // max |N' - (b(N) - d N - d_I I)|
};

/// Centered-difference residuals of the total-immune and total-population
/// balance laws along a recorded trajectory.
ConservationResidual conservation_residual(const Trajectory& traj, const ModelParameters& params,
                                           const BirthFunction& birth);

}  // namespace immunokinetics
