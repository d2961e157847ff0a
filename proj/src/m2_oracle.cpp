#include "immunokinetics/m2_oracle.hpp"

#include <cmath>
#include <sstream>

#include "immunokinetics/errors.hpp"

namespace immunokinetics {

namespace {

constexpr double kQuadTol = 1e-9;

void require_history(const PiecewiseCubic& h, double t, const char* name) {
  if (h.empty() || h.front() > 1e-12 || h.back() < t - 1e-9 * std::max(1.0, t)) {
    std::ostringstream msg;
    msg << "history " << name << " does not cover [0, " << t << "]";
    throw DomainError(msg.str());
  }
}

// Shared two-branch evaluation.
//   boundary(t*) : inflow flux at z_max when the cohort was emitted
//   loss(s, z)   : hazard along the characteristic
double trace(double t, double z, const std::function<double(double)>& boundary,
             const std::function<double(double, double)>& loss, const DecayFunction& g,
             double z_min, double z_max, const std::function<double(double)>& psi) {
  if (t < 0.0) throw DomainError("exact solution requested for t < 0");
  if (z < z_min - 1e-12 * (z_max - z_min) || z > z_max + 1e-12 * (z_max - z_min)) {
    throw DomainError("exact solution requested outside [z_min, z_max]");
  }
  if (const auto emitted = backtrace_emission_time(t, z, g, z_min, z_max)) {
    const double t_star = *emitted;
    const double exponent = adaptive_simpson(
        [&](double s) {
          return loss(s, flow_characteristic(z_max, s - t_star, g, z_min, z_max));
        },
        t_star, t, kQuadTol, 1e-14);
    return boundary(t_star) / g(z_max) * std::exp(-exponent);
  }
  // Cohort already immune at t = 0: find its starting level z0.
  const double z0 = bisect([&](double zs) { return g.travel_time(zs, z) - t; }, z, z_max,
                           1e-14 * (z_max - z_min));
  const double exponent = adaptive_simpson(
      [&](double s) { return loss(s, flow_characteristic(z0, s, g, z_min, z_max)); }, 0.0, t,
      kQuadTol, 1e-14);
  return psi(z0) * std::exp(-exponent);
}

}  // namespace

double CharacteristicInputs::hazard(double t, double z) const {
  return d - g.derivative(z) + boost_rate * infected_fraction(t);
}

CharacteristicInputs characteristic_inputs_from(const Trajectory& traj,
                                                const ModelParameters& params,
                                                const DecayFunction& g,
                                                std::function<double(double)> psi) {
  std::vector<double> t, frac, inflow;
  t.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    t.push_back(s.t);
    frac.push_back(s.state.I / s.state.N(traj.grid));
    inflow.push_back(s.B);
  }
  CharacteristicInputs in;
  in.infected_fraction = PiecewiseCubic::smooth(t, std::move(frac));
  in.inflow = PiecewiseCubic::smooth(std::move(t), std::move(inflow));
  in.d = params.d;
  in.boost_rate = params.beta * params.boost_contact_multiplier;
  in.g = g;
  in.z_min = params.z_min;
  in.z_max = params.z_max;
  in.psi = std::move(psi);
  return in;
}

std::optional<double> backtrace_emission_time(double t, double z, const DecayFunction& g,
                                              double z_min, double z_max) {
  if (z < z_min - 1e-12 * (z_max - z_min) || z > z_max + 1e-12 * (z_max - z_min)) {
    throw DomainError("backtrace_emission_time: z outside [z_min, z_max]");
  }
  if (z >= z_max) return t;
  const double full = g.travel_time(z_max, z_min);
  const double horizon = std::min(t, full);
  const double lowest = flow_characteristic(z_max, horizon, g, z_min, z_max);
  if (lowest > z) return std::nullopt;  // pre-initial characteristic
  const double elapsed = bisect(
      [&](double e) { return flow_characteristic(z_max, e, g, z_min, z_max) - z; }, 0.0,
      horizon, 1e-12);
  return t - elapsed;
}

double exact_r_m2(double t, double z, const CharacteristicInputs& inputs) {
  require_history(inputs.infected_fraction, t, "I/N");
  require_history(inputs.inflow, t, "B");
  return trace(
      t, z, [&](double ts) { return inputs.inflow(ts); },
      [&](double s, double zc) { return inputs.hazard(s, zc); }, inputs.g, inputs.z_min,
      inputs.z_max, inputs.psi);
}

double no_boost_exact(double t, double z, const PiecewiseCubic& infected,
                      const std::function<double(double)>& psi, const ModelParameters& params,
                      const DecayFunction& g) {
  require_history(infected, t, "I");
  return trace(
      t, z, [&](double ts) { return params.gamma * infected(ts); },
      [&](double, double zc) { return params.d - g.derivative(zc); }, g, params.z_min,
      params.z_max, psi);
}

}  // namespace immunokinetics
