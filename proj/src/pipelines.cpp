#include "immunokinetics/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "immunokinetics/errors.hpp"
#include "immunokinetics/m2_oracle.hpp"
#include "immunokinetics/numerics.hpp"

namespace immunokinetics {

namespace {

template <class F>
auto launch(unsigned threads, F&& f) {
  return std::async(threads > 1 ? std::launch::async : std::launch::deferred, std::forward<F>(f));
}

double initial_immune_mass(const Scenario& s) {
  const auto psi = initial_density(s, ModelTag::M1);
  return adaptive_simpson(psi, s.params.z_min, s.params.z_max, 1e-12, 1e-300);
}

PiecewiseCubic column(const TimeSeries& ts, std::size_t j) {
  std::vector<double> v;
  v.reserve(ts.size());
  for (const auto& y : ts.y) v.push_back(y[j]);
  return PiecewiseCubic::smooth(ts.t, std::move(v));
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

}  // namespace

double dde_step(double tau, double hint) {
  if (!(hint > 0.0)) throw ConfigError("dt must be > 0");
  return tau / std::ceil(tau / hint - 1e-9);
}

TimeSeries run_mol(const Scenario& s, std::optional<double> dt) {
  const MolRates rates = make_mol_rates(s);
  double step = 0.05;
  if (dt) {
    step = *dt;
  } else {
    const double fastest = std::max({rates.mu_F, rates.nu_W, rates.sigma_C,
                                     s.params.beta * s.params.boost_contact_multiplier +
                                         s.params.gamma + s.params.d + s.params.d_I});
    step = std::min(step, 0.5 / fastest);
  }
  return simulate_mol(make_mol_initial(s), rates, s.params, s.birth, s.t_end, step);
}

TimeSeries run_sirs_dde(const Scenario& s, std::optional<double> dt) {
  const double tau = transit_time(s.decay, s.params.z_min, s.params.z_max);
  const double R0 = initial_immune_mass(s);
  const SirsState h{s.S0, s.I0, R0};
  return simulate_sirs_dde(s.params, s.birth, tau, [h](double) { return h; }, s.t_end,
                           dt ? *dt : dde_step(tau, 0.05));
}

TimeSeries run_sis_dde(const Scenario& s, std::optional<double> dt) {
  if (s.params.d_I != 0.0) throw ConfigError("sis-dde requires parameters.d_I = 0");
  const double tau = transit_time(s.decay, s.params.z_min, s.params.z_max);
  const double N0 = s.S0 + s.I0 + initial_immune_mass(s);
  if (!(N0 > 0.0)) throw ConfigError("sis-dde: initial population must be > 0");
  const SisLag h{s.S0 / N0, s.I0 / N0};
  return simulate_sis_dde(s.params, tau, [h](double) { return h; }, s.t_end,
                          dt ? *dt : dde_step(tau, 0.05));
}

// --- m1 vs sirs-dde -------------------------------------------------------------

ComparisonResult compare_m1_vs_sirs_dde(const Scenario& s, unsigned threads) {
  if (!s.kernel.is_no_boost()) {
    throw ConfigError("m1-vs-sirs-dde requires a kernel without boosting (c_max = c0 = 0)");
  }
  const double tau = transit_time(s.decay, s.params.z_min, s.params.z_max);
  if (!(s.t_end > tau)) throw ConfigError("m1-vs-sirs-dde needs run.t_end > transit time");
  SimulationConfig cfg = make_pde_config(s, ModelTag::M1);
  cfg.output_stride = 1;
  auto pde = launch(threads, [&] { return simulate(cfg); });
  auto dde = launch(threads, [&] { return run_sirs_dde(s); });
  const Trajectory traj = pde.get();
  const TimeSeries ts = dde.get();
  const PiecewiseCubic I_dde = column(ts, 1);

  ComparisonResult out;
  out.metric = "max |Lambda - gamma I(t - tau) exp(-d tau)| / max |Lambda| on (tau, 3 tau]";
  out.tolerance = 0.01;
  out.columns = {"t", "Lambda_pde", "Lambda_dde", "abs_diff"};
  const double decay = s.params.gamma * std::exp(-s.params.d * tau);
  const double window_end = std::min(3.0 * tau, s.t_end);
  double scale = 0.0;
  double worst = 0.0;
  for (const auto& smp : traj.samples) {
    if (smp.t <= tau || smp.t > window_end * (1 + 1e-12)) continue;
    const double ref = decay * I_dde(std::min(smp.t - tau, ts.t.back()));
    const double diff = std::abs(smp.Lambda - ref);
    scale = std::max(scale, std::abs(smp.Lambda));
    out.rows.push_back({smp.t, smp.Lambda, ref, diff});
    if (diff > worst) {
      worst = diff;
      out.witness_t = smp.t;
      out.witness_value = smp.Lambda;
    }
  }
  if (out.rows.empty()) throw ConfigError("m1-vs-sirs-dde: no samples in the comparison window");
  out.discrepancy = scale > 0.0 ? worst / scale : worst;
  out.passed = out.discrepancy <= out.tolerance;
  out.notes.push_back("tau = " + fmt(tau) + ", cells = " + std::to_string(cfg.grid.size()));
  return out;
}

// --- m2 vs oracle -----------------------------------------------------------------

double m2_oracle_l1_error(const Trajectory& traj, const Scenario& s) {
  const auto psi = initial_density(s, ModelTag::M2);
  const auto inputs = characteristic_inputs_from(traj, s.params, s.decay, psi);
  const auto& last = traj.samples.back();
  double err = 0.0;
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    const double exact = exact_r_m2(last.t, traj.grid.center(i), inputs);
    err += std::abs(last.state.r[i] - exact) * traj.grid.width(i);
  }
  return err;
}

ComparisonResult compare_m2_vs_oracle(const Scenario& s, unsigned threads) {
  const std::size_t base = s.grid_cells;
  const std::size_t cells[3] = {base, 2 * base, 4 * base};
  std::vector<std::future<double>> errors;
  for (std::size_t n : cells) {
    errors.push_back(launch(threads, [&s, n] {
      SimulationConfig cfg = make_pde_config(s, ModelTag::M2, n);
      cfg.output_stride = 1;
      cfg.dt.reset();
      return m2_oracle_l1_error(simulate(cfg), s);
    }));
  }
  ComparisonResult out;
  out.metric = "L1 error ratio per grid halving at t_end";
  out.tolerance = 1.8;
  out.columns = {"cells", "dz", "l1_error", "ratio"};
  double prev = 0.0;
  double min_ratio = INFINITY;
  for (std::size_t k = 0; k < 3; ++k) {
    const double e = errors[k].get();
    const double ratio = k == 0 ? NAN : prev / e;
    if (k > 0 && !(ratio >= min_ratio)) {
      min_ratio = ratio;
      out.witness_t = s.t_end;
      out.witness_value = e;
    }
    out.rows.push_back({static_cast<double>(cells[k]),
                        (s.params.z_max - s.params.z_min) / static_cast<double>(cells[k]), e,
                        ratio});
    prev = e;
  }
  out.discrepancy = min_ratio;
  out.passed = min_ratio >= out.tolerance;
  return out;
}

// --- m2 vs sis-dde ----------------------------------------------------------------

ComparisonResult compare_m2_vs_sis_dde(const Scenario& s, unsigned threads) {
  if (s.params.d_I != 0.0) throw ConfigError("m2-vs-sis-dde requires parameters.d_I = 0");
  const double N0 = s.S0 + s.I0 + initial_immune_mass(s);
  if (std::abs(N0 - 1.0) > 1e-6) {
    throw ConfigError("m2-vs-sis-dde requires a normalized initial state (S + I + R = 1)");
  }
  if (std::abs(s.birth(1.0) - s.params.d) > 1e-9 * s.params.d) {
    throw ConfigError("m2-vs-sis-dde requires b(1) = d so that N stays 1");
  }
  SimulationConfig cfg = make_pde_config(s, ModelTag::M2);
  auto pde = launch(threads, [&] { return simulate(cfg); });
  auto dde = launch(threads, [&] { return run_sis_dde(s); });
  const Trajectory traj = pde.get();
  const TimeSeries ts = dde.get();
  const PiecewiseCubic S_dde = column(ts, 0);
  const PiecewiseCubic I_dde = column(ts, 1);

  double S_scale = 0.0, I_scale = 0.0;
  for (const auto& y : ts.y) {
    S_scale = std::max(S_scale, std::abs(y[0]));
    I_scale = std::max(I_scale, std::abs(y[1]));
  }
  ComparisonResult out;
  out.metric = "max over t and {S, I} of |pde - dde| / max |dde|";
  out.tolerance = 0.01;
  out.columns = {"t", "S_pde", "S_dde", "I_pde", "I_dde"};
  for (const auto& smp : traj.samples) {
    const double N = smp.state.N(traj.grid);
    const double Sp = smp.state.S / N;
    const double Ip = smp.state.I / N;
    const double Sd = S_dde(std::min(smp.t, ts.t.back()));
    const double Id = I_dde(std::min(smp.t, ts.t.back()));
    out.rows.push_back({smp.t, Sp, Sd, Ip, Id});
    const double dev = std::max(std::abs(Sp - Sd) / S_scale, std::abs(Ip - Id) / I_scale);
    if (dev > out.discrepancy) {
      out.discrepancy = dev;
      out.witness_t = smp.t;
      out.witness_value = dev;
    }
  }
  out.passed = out.discrepancy <= out.tolerance;
  return out;
}

// --- mol theta = 0 vs lumped ------------------------------------------------------

ComparisonResult compare_mol_theta0_vs_m2(const Scenario& s) {
  MolRates rates = make_mol_rates(s);
  rates.theta = 0.0;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ComparisonResult out;
  out.metric = "max relative difference of the theta = 0 chain and the lumped system";
  out.tolerance = 1e-13;
  out.columns = {"sample", "max_abs_diff", "scale"};
  for (int k = 0; k < 1000; ++k) {
    const double scale = std::pow(10.0, 4.0 * u(rng) - 1.0);
    const MolState st{scale * u(rng), scale * u(rng), scale * u(rng), scale * u(rng),
                      scale * u(rng) + 1e-3};
    const MolState a = mol_rhs(st, rates, s.params, s.birth);
    const MolState b = mol_m2_lumped_rhs(st, rates, s.params, s.birth);
    const double diffs[5] = {a.S - b.S, a.I - b.I, a.R_F - b.R_F, a.R_W - b.R_W, a.R_C - b.R_C};
    const double mags[5] = {a.S, a.I, a.R_F, a.R_W, a.R_C};
    double d = 0.0, m = 0.0;
    for (int i = 0; i < 5; ++i) {
      d = std::max(d, std::abs(diffs[i]));
      m = std::max(m, std::abs(mags[i]));
    }
    // scale by the magnitude of the state, the size of each rate term
    const double ref = std::max(m, st.N() * (rates.mu_F + rates.nu_W + rates.sigma_C +
                                             s.params.beta + s.params.gamma + s.params.d));
    out.rows.push_back({static_cast<double>(k), d, ref});
    if (d / ref > out.discrepancy) {
      out.discrepancy = d / ref;
      out.witness_t = k;
      out.witness_value = d;
    }
  }
  out.passed = out.discrepancy <= out.tolerance;
  return out;
}

}  // namespace immunokinetics
