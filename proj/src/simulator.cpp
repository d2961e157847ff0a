#include "immunokinetics/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "immunokinetics/errors.hpp"

namespace immunokinetics {

double cfl_dt(const ImmunityGrid& grid, const DecayFunction& g, const ModelParameters& params) {
  double g_max = 0.0;
  for (double e : grid.edges()) g_max = std::max(g_max, g(e));
  const double transport_rate = g_max / grid.min_width();
  const double boost = params.beta * params.boost_contact_multiplier;
  const double rates = params.d + boost + params.gamma + params.d_I;

  double dt = 0.9 / transport_rate;
  dt = std::min(dt, 0.9 / rates);
  // Diagonal coefficient of the density update: 1 - dt (g/dz + d + hazard).
  dt = std::min(dt, 1.0 / (transport_rate + params.d + boost));
  return dt;
}

BoostingKernel effective_kernel(const SimulationConfig& cfg) {
  if (cfg.model == ModelTag::M2) {
    return BoostingKernel::to_maximum(cfg.grid.z_min(), cfg.grid.z_max());
  }
  return cfg.kernel;
}

PdeStepper::PdeStepper(const SimulationConfig& cfg)
    : params_(cfg.params),
      birth_(cfg.birth),
      grid_(cfg.grid),
      transfer_(effective_kernel(cfg), cfg.grid),
      g_edge_(cfg.grid.size() + 1),
      gain_(cfg.grid.size()),
      next_(cfg.grid.size()) {
  params_.validate();
  if (std::abs(grid_.z_min() - params_.z_min) > 1e-12 * (params_.z_max - params_.z_min) ||
      std::abs(grid_.z_max() - params_.z_max) > 1e-12 * (params_.z_max - params_.z_min)) {
    throw ConfigError("grid does not span [z_min, z_max]");
  }
  for (std::size_t i = 0; i <= grid_.size(); ++i) g_edge_[i] = cfg.decay(grid_.edge(i));
  cfl_ = cfl_dt(grid_, cfg.decay, params_);
  if (cfg.initial.r.size() != grid_.size()) {
    throw ConfigError("initial density has the wrong number of cells");
  }
  extinction_floor_ = 1e-12 * cfg.initial.N(grid_);
}

FluxDiagnostics PdeStepper::diagnostics(const State& s) const {
  const double N = s.N(grid_);
  const double hazard = N > 0.0 ? params_.boost_contact_multiplier * params_.beta * s.I / N : 0.0;
  return {g_edge_.front() * s.r.front(),
          params_.gamma * s.I + hazard * transfer_.boundary_mass(s.r)};
}

void PdeStepper::step(State& s, double dt) {
  if (dt > cfl_ * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt exceeds CFL limit (" << dt << " > " << cfl_ << ")";
    throw ConfigError(msg.str());
  }
  const std::size_t m = grid_.size();
  const std::size_t top = m - 1;
  const double R = s.R(grid_);
  const double N = s.S + s.I + R;
  if (!(N > extinction_floor_)) {
    std::ostringstream msg;
    msg << "population extinction (N = " << N << ")";
    throw ExtinctionError(msg.str());
  }
  const double ratio = s.I / N;
  const double hazard = params_.boost_contact_multiplier * params_.beta * ratio;
  const double Lambda = g_edge_[0] * s.r[0];
  const double B = params_.gamma * s.I + hazard * transfer_.boundary_mass(s.r);

  transfer_.interior_gain(s.r, gain_);
  // Every term below is a nonnegative coefficient times a nonnegative value,
  // so nonnegative input stays nonnegative in floating point as well.
  for (std::size_t i = 0; i < m; ++i) {
    const double dz = grid_.width(i);
    const double keep =
        1.0 - dt * (g_edge_[i] / dz + params_.d + hazard * (1.0 - transfer_.stay(i)));
    const double from_above = (i == top) ? B : g_edge_[i + 1] * s.r[i + 1];
    next_[i] = keep * s.r[i] + dt / dz * from_above + dt * hazard * gain_[i];
  }

  double r_max = 0.0;
  double r_min = 0.0;
  for (double v : next_) {
    r_max = std::max(r_max, std::abs(v));
    r_min = std::min(r_min, v);
  }
  if (r_min < -1e-12 * r_max) {
    std::ostringstream msg;
    msg << "positivity violated: min density " << r_min;
    throw PositivityError(msg.str());
  }

  const double infection = params_.beta * s.S * ratio;
  const double S_next = s.S * (1.0 - dt * (params_.beta * ratio + params_.d)) +
                        dt * (birth_(N) + Lambda);
  const double I_next = s.I * (1.0 - dt * (params_.gamma + params_.d + params_.d_I)) +
                        dt * infection;
  s.S = S_next;
  s.I = I_next;
  s.r.swap(next_);
}

State step_m1(const State& state, const SimulationConfig& cfg, double dt) {
  PdeStepper stepper(cfg);
  State next = state;
  stepper.step(next, dt);
  return next;
}

Trajectory simulate(const SimulationConfig& cfg) {
  if (!(cfg.t_end > 0.0)) throw ConfigError("run.t_end must be > 0");
  if (cfg.output_stride == 0) throw ConfigError("run.output_stride must be >= 1");
  PdeStepper stepper(cfg);
  for (double v : cfg.initial.r) {
    if (!(v >= 0.0)) throw ConfigError("initial density must be nonnegative");
  }
  if (cfg.initial.S < 0.0 || cfg.initial.I < 0.0) {
    throw ConfigError("initial S and I must be nonnegative");
  }

  double target = stepper.cfl_limit();
  if (cfg.dt) {
    if (*cfg.dt > stepper.cfl_limit() * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "dt exceeds CFL limit (" << *cfg.dt << " > " << stepper.cfl_limit() << ")";
      throw ConfigError(msg.str());
    }
    if (!(*cfg.dt > 0.0)) throw ConfigError("run.dt must be > 0");
    target = *cfg.dt;
  }
  const auto n_steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_end / target - 1e-9)));
  const double dt = cfg.t_end / static_cast<double>(n_steps);

  Trajectory traj;
  traj.dt = dt;
  traj.grid = cfg.grid;
  traj.model = cfg.model;
  traj.samples.reserve(n_steps / cfg.output_stride + 2);

  State state = cfg.initial;
  auto record = [&](std::size_t k) {
    const auto diag = stepper.diagnostics(state);
    traj.samples.push_back({static_cast<double>(k) * dt, state, diag.Lambda, diag.B});
  };
  record(0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    stepper.step(state, dt);
    if (k % cfg.output_stride == 0 || k == n_steps) record(k);
  }
  traj.samples.back().t = cfg.t_end;
  return traj;
}

ConservationResidual conservation_residual(const Trajectory& traj, const ModelParameters& params,
                                           const BirthFunction& birth) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw ConfigError("conservation_residual needs at least 3 samples");
  ConservationResidual out;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double span = s[k + 1].t - s[k - 1].t;
    const double R_prev = s[k - 1].state.R(traj.grid);
    const double R_next = s[k + 1].state.R(traj.grid);
    const double R = s[k].state.R(traj.grid);
    const double I = s[k].state.I;
    const double immune_rate = (R_next - R_prev) / span;
    const double immune_rhs = params.gamma * I - s[k].Lambda - params.d * R;
    out.immune = std::max(out.immune, std::abs(immune_rate - immune_rhs));

    const double N_prev = s[k - 1].state.S + s[k - 1].state.I + R_prev;
    const double N_next = s[k + 1].state.S + s[k + 1].state.I + R_next;
    const double N = s[k].state.S + I + R;
    const double total_rate = (N_next - N_prev) / span;
    const double total_rhs = birth(N) - params.d * N - params.d_I * I;
    out.total = std::max(out.total, std::abs(total_rate - total_rhs));
  }
  return out;
}

}  // namespace immunokinetics
