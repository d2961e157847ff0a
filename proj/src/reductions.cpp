#include "immunokinetics/reductions.hpp"

#include <cmath>
#include <sstream>

#include "immunokinetics/errors.hpp"
#include "immunokinetics/numerics.hpp"

namespace immunokinetics {

namespace {

std::vector<double> axpy(const std::vector<double>& y, double a, const std::vector<double>& k) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

std::size_t step_count(double t_end, double dt) {
  if (!(t_end > 0.0)) throw ConfigError("t_end must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt - 1e-9)));
}

}  // namespace

TimeSeries integrate_ode(const OdeRhs& rhs, std::vector<double> y0, double t_end, double dt) {
  const std::size_t n = step_count(t_end, dt);
  const double h = t_end / static_cast<double>(n);
  TimeSeries out;
  out.t.reserve(n + 1);
  out.y.reserve(n + 1);
  out.t.push_back(0.0);
  out.y.push_back(y0);
  std::vector<double> y = std::move(y0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * h;
    const auto k1 = rhs(t, y);
    const auto k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(t + h, axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out.t.push_back(static_cast<double>(k + 1) * h);
    out.y.push_back(y);
  }
  out.t.back() = t_end;
  return out;
}

// --- DdeHistory --------------------------------------------------------------

DdeHistory::DdeHistory(double tau, HistoryFunction initial)
    : tau_(tau), initial_(std::move(initial)) {
  if (!(tau > 0.0)) throw ConfigError("delay tau must be > 0");
}

void DdeHistory::push(double t, std::vector<double> y, std::vector<double> dy) {
  if (!knots_.empty() && !(t > knots_.back().t)) {
    throw DomainError("DdeHistory: knots must be pushed in increasing time");
  }
  knots_.push_back({t, std::move(y), std::move(dy)});
  // keep one knot at or before (latest - tau) so every lag stays covered
  while (knots_.size() > 2 && knots_[1].t <= t - tau_) knots_.pop_front();
}

std::vector<double> DdeHistory::at(double t) const {
  if (t <= 0.0 || knots_.empty()) {
    if (t < -tau_ * (1.0 + 1e-12)) throw DomainError("DdeHistory: lag before -tau requested");
    return initial_(t);
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (t > knots_.back().t + slack) {
    throw DomainError("DdeHistory: insufficient history (lag ahead of the solution)");
  }
  if (t < knots_.front().t - slack) {
    throw DomainError("DdeHistory: insufficient history (lag already discarded)");
  }
  std::size_t i = 0;
  while (i + 2 < knots_.size() && knots_[i + 1].t <= t) ++i;
  if (knots_.size() == 1) return knots_.front().y;
  const Knot& a = knots_[i];
  const Knot& b = knots_[i + 1];
  const double h = b.t - a.t;
  const double s = std::clamp((t - a.t) / h, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  std::vector<double> out(a.y.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = h00 * a.y[k] + h10 * h * a.dy[k] + h01 * b.y[k] + h11 * h * b.dy[k];
  }
  return out;
}

TimeSeries integrate_dde(const DdeRhs& rhs, const HistoryFunction& history, double tau,
                         double t_end, double dt) {
  if (!(tau > 0.0)) throw ConfigError("delay tau must be > 0");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  const double steps_per_delay = tau / dt;
  const double rounded = std::round(steps_per_delay);
  if (rounded < 1.0 || std::abs(steps_per_delay - rounded) > 1e-9 * steps_per_delay) {
    std::ostringstream msg;
    msg << "dt = " << dt << " does not divide tau = " << tau;
    throw ConfigError(msg.str());
  }
  const double h = tau / rounded;
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));

  DdeHistory hist(tau, history);
  std::vector<double> y = history(0.0);
  TimeSeries out;
  out.t.reserve(n + 1);
  out.y.reserve(n + 1);
  out.t.push_back(0.0);
  out.y.push_back(y);

  auto f = [&](double t, const std::vector<double>& state) {
    return rhs(t, state, hist.at(t - tau));
  };
  auto k1 = f(0.0, y);
  hist.push(0.0, y, k1);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * h;
    const auto k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const auto k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const auto k4 = f(t + h, axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    const double t_next = static_cast<double>(k + 1) * h;
    k1 = f(t_next, y);
    hist.push(t_next, y, k1);
    out.t.push_back(t_next);
    out.y.push_back(y);
  }
  return out;
}

// --- Method of lines -------------------------------------------------------------

MolRates mol_rates_from_decay(const DecayFunction& g, double z_min, double z_max, double theta) {
  if (!(z_max > z_min)) throw ConfigError("mol: need z_max > z_min");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("kernel.theta must lie in [0, 1]");
  const double h = (z_max - z_min) / 3.0;
  const double z_w = z_min + h;
  const double z_f = z_min + 2.0 * h;
  return {g(z_f) / h, g(z_w) / h, g(z_min) / h, theta};
}

namespace {

double mol_hazard(const MolState& s, const ModelParameters& params) {
  const double N = s.N();
  if (!(N > 0.0)) throw ExtinctionError("mol: total population must be > 0");
  return params.boost_contact_multiplier * params.beta * s.I / N;
}

}  // namespace

MolState mol_rhs(const MolState& s, const MolRates& rates, const ModelParameters& params,
                 const BirthFunction& birth) {
  const double N = s.N();
  const double boost = mol_hazard(s, params);
  const double infection = params.beta * s.S * s.I / N;
  MolState out;
  out.S = birth(N) - infection - params.d * s.S + rates.sigma_C * s.R_C;
  out.I = infection - (params.gamma + params.d + params.d_I) * s.I;
  out.R_F = params.gamma * s.I - rates.mu_F * s.R_F - params.d * s.R_F +
            boost * ((1.0 - rates.theta) * s.R_C + s.R_W);
  out.R_W = rates.mu_F * s.R_F - rates.nu_W * s.R_W - params.d * s.R_W +
            boost * (rates.theta * s.R_C - s.R_W);
  out.R_C = rates.nu_W * s.R_W - rates.sigma_C * s.R_C - params.d * s.R_C - boost * s.R_C;
  return out;
}

MolState mol_m2_lumped_rhs(const MolState& s, const MolRates& rates,
                           const ModelParameters& params, const BirthFunction& birth) {
  const double N = s.N();
  const double boost = mol_hazard(s, params);
  const double infection = params.beta * s.S * s.I / N;
  // g(z_max) * R_{z_max}: recovered plus every boosted host below R_F
  const double boundary_flux = params.gamma * s.I + boost * (s.R_W + s.R_C);
  MolState out;
  out.S = birth(N) - infection - params.d * s.S + rates.sigma_C * s.R_C;
  out.I = infection - (params.gamma + params.d + params.d_I) * s.I;
  out.R_F = boundary_flux - (rates.mu_F + params.d) * s.R_F;
  out.R_W = rates.mu_F * s.R_F - (rates.nu_W + params.d) * s.R_W - boost * s.R_W;
  out.R_C = rates.nu_W * s.R_W - (rates.sigma_C + params.d) * s.R_C - boost * s.R_C;
  return out;
}

TimeSeries simulate_mol(const MolState& initial, const MolRates& rates,
                        const ModelParameters& params, const BirthFunction& birth, double t_end,
                        double dt) {
  auto rhs = [&](double, const std::vector<double>& y) {
    const MolState s{y[0], y[1], y[2], y[3], y[4]};
    const MolState ds = mol_rhs(s, rates, params, birth);
    return std::vector<double>{ds.S, ds.I, ds.R_F, ds.R_W, ds.R_C};
  };
  return integrate_ode(rhs, {initial.S, initial.I, initial.R_F, initial.R_W, initial.R_C},
                       t_end, dt);
}

// --- Delay systems -------------------------------------------------------------------

SirsState sirs_dde_rhs(double, const SirsState& s, double I_lagged,
                       const ModelParameters& params, const BirthFunction& birth, double tau) {
  const double N = s.S + s.I + s.R;
  if (!(N > 0.0)) throw ExtinctionError("sirs-dde: total population must be > 0");
  const double infection = params.beta * s.S * s.I / N;
  const double returning = params.gamma * I_lagged * std::exp(-params.d * tau);
  return {birth(N) - infection - params.d * s.S + returning,
          infection - (params.gamma + params.d + params.d_I) * s.I,
          params.gamma * s.I - returning - params.d * s.R};
}

SirsState sirs_dde_rhs(double t, const SirsState& s, const DdeHistory& hist,
                       const ModelParameters& params, const BirthFunction& birth) {
  const auto lagged = hist.at(t - hist.tau());
  return sirs_dde_rhs(t, s, lagged.at(1), params, birth, hist.tau());
}

SisState sis_dde_rhs(double, const SisState& s, const SisLag& lagged,
                     const ModelParameters& params, double tau) {
  if (params.d_I != 0.0) {
    throw ConfigError("sis-dde requires d_I = 0");
  }
  if (std::abs(s.S + s.I) > 1.0 + 1e-9 || std::abs(lagged.S + lagged.I) > 1.0 + 1e-9) {
    throw NormalizationError("sis-dde: S + I exceeds the normalized population 1");
  }
  const double recovered_lagged = 1.0 - lagged.S - lagged.I;
  const double returning = lagged.I * (params.gamma + params.beta * recovered_lagged) *
                           std::exp(-params.d * tau - params.beta * s.A);
  return {params.d * (1.0 - s.S) - params.beta * s.I * s.S + returning,
          params.beta * s.I * s.S - (params.gamma + params.d) * s.I, s.I - lagged.I};
}

SisState sis_dde_rhs(double t, const SisState& s, const DdeHistory& hist,
                     const ModelParameters& params) {
  const auto lagged = hist.at(t - hist.tau());
  return sis_dde_rhs(t, s, SisLag{lagged.at(0), lagged.at(1)}, params, hist.tau());
}

TimeSeries simulate_sirs_dde(const ModelParameters& params, const BirthFunction& birth,
                             double tau, const std::function<SirsState(double)>& history,
                             double t_end, double dt) {
  auto rhs = [&](double t, const std::vector<double>& y, const std::vector<double>& lag) {
    const SirsState ds = sirs_dde_rhs(t, {y[0], y[1], y[2]}, lag[1], params, birth, tau);
    return std::vector<double>{ds.S, ds.I, ds.R};
  };
  auto hist = [&](double t) {
    const SirsState s = history(t);
    return std::vector<double>{s.S, s.I, s.R};
  };
  return integrate_dde(rhs, hist, tau, t_end, dt);
}

TimeSeries simulate_sis_dde(const ModelParameters& params, double tau,
                            const std::function<SisLag(double)>& history, double t_end,
                            double dt) {
  // A(0) = integral of the initial I history over [-tau, 0]
  const double A0 =
      adaptive_simpson([&](double u) { return history(u).I; }, -tau, 0.0, 1e-12, 1e-300);
  auto rhs = [&](double t, const std::vector<double>& y, const std::vector<double>& lag) {
    const SisState ds = sis_dde_rhs(t, {y[0], y[1], y[2]}, {lag[0], lag[1]}, params, tau);
    return std::vector<double>{ds.S, ds.I, ds.A};
  };
  auto hist = [&](double t) {
    const SisLag s = history(t);
    // A is never read through the lag; at t = 0 it seeds the state.
    return std::vector<double>{s.S, s.I, t == 0.0 ? A0 : 0.0};
  };
  return integrate_dde(rhs, hist, tau, t_end, dt);
}

}  // namespace immunokinetics
