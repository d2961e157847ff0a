#pragma once

// Finite-dimensional reductions of the structured model: the three-class
// method-of-lines chain and the two constant-delay systems, together with the
// RK4 integrators they run on.

#include <deque>
#include <functional>
#include <vector>

#include "immunokinetics/model.hpp"

namespace immunokinetics {

struct TimeSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> y;

  std::size_t size() const { return t.size(); }
};

using OdeRhs = std::function<std::vector<double>(double t, const std::vector<double>& y)>;
using DdeRhs = std::function<std::vector<double>(double t, const std::vector<double>& y,
                                                 const std::vector<double>& y_lagged)>;
using HistoryFunction = std::function<std::vector<double>(double t)>;

/// Classical RK4 with n = ceil(t_end / dt) equal steps.
TimeSeries integrate_ode(const OdeRhs& rhs, std::vector<double> y0, double t_end, double dt);

/// Stored solution of a delay equation: the initial function on [-tau, 0]
/// followed by Hermite knots (t, y, y') from the integrator. Knots older
/// than one delay behind the newest are discarded.
class DdeHistory {
 public:
  DdeHistory(double tau, HistoryFunction initial);

  double tau() const { return tau_; }
  double latest() const { return knots_.empty() ? 0.0 : knots_.back().t; }

  void push(double t, std::vector<double> y, std::vector<double> dy);
  std::vector<double> at(double t) const;

 private:
  struct Knot {
    double t;
    std::vector<double> y;
    std::vector<double> dy;
  };
  double tau_;
  HistoryFunction initial_;
  std::deque<Knot> knots_;
};

/// RK4 method of steps. dt must divide tau exactly (relative slack 1e-9);
/// lagged values come from the cubic Hermite interpolant of stored steps.
TimeSeries integrate_dde(const DdeRhs& rhs, const HistoryFunction& history, double tau,
                         double t_end, double dt);

// --- Method-of-lines chain --------------------------------------------------

struct MolState {
  double S = 0.0;
  double I = 0.0;
  double R_F = 0.0;  // high immunity
  double R_W = 0.0;  // intermediate
  double R_C = 0.0;  // critically low

  double N() const { return S + I + R_F + R_W + R_C; }
};

struct MolRates {
  double mu_F = 0.0;     // waning R_F -> R_W
  double nu_W = 0.0;     // waning R_W -> R_C
  double sigma_C = 0.0;  // waning R_C -> S
  double theta = 0.0;    // share of R_C boosts that land in R_W
};

/// Rates for four equally spaced points z_min < z_w < z_f < z_max with spacing
/// h: each rate is g at the class's lower point divided by h.
MolRates mol_rates_from_decay(const DecayFunction& g, double z_min, double z_max, double theta);

MolState mol_rhs(const MolState& s, const MolRates& rates, const ModelParameters& params,
                 const BirthFunction& birth);

/// The same chain written with every boosted host entering through the z_max
/// boundary, the lumping used for the boost-to-maximum model.
MolState mol_m2_lumped_rhs(const MolState& s, const MolRates& rates,
                           const ModelParameters& params, const BirthFunction& birth);

TimeSeries simulate_mol(const MolState& initial, const MolRates& rates,
                        const ModelParameters& params, const BirthFunction& birth, double t_end,
                        double dt);

// --- Delay systems ----------------------------------------------------------

struct SirsState {
  double S = 0.0;
  double I = 0.0;
  double R = 0.0;
};

/// SIRS with immunity lasting exactly tau.
SirsState sirs_dde_rhs(double t, const SirsState& s, double I_lagged,
                       const ModelParameters& params, const BirthFunction& birth, double tau);
SirsState sirs_dde_rhs(double t, const SirsState& s, const DdeHistory& hist,
                       const ModelParameters& params, const BirthFunction& birth);

/// Normalized (N = 1) SIS-type delay system; A is the exposure integral of I
/// over the last delay window, carried as a state variable.
struct SisState {
  double S = 0.0;
  double I = 0.0;
  double A = 0.0;
};
struct SisLag {
  double S = 0.0;
  double I = 0.0;
};

SisState sis_dde_rhs(double t, const SisState& s, const SisLag& lagged,
                     const ModelParameters& params, double tau);
SisState sis_dde_rhs(double t, const SisState& s, const DdeHistory& hist,
                     const ModelParameters& params);

/// Columns of the returned series: S, I, R.
TimeSeries simulate_sirs_dde(const ModelParameters& params, const BirthFunction& birth,
                             double tau, const std::function<SirsState(double)>& history,
                             double t_end, double dt);

/// Columns of the returned series: S, I, A. History gives (S, I) on [-tau, 0].
TimeSeries simulate_sis_dde(const ModelParameters& params, double tau,
                            const std::function<SisLag(double)>& history, double t_end,
                            double dt);

}  // namespace immunokinetics
