#include "immunokinetics/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "immunokinetics/equilibrium_search.hpp"
#include "immunokinetics/errors.hpp"

namespace immunokinetics {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ModelParameters::validate() const {
  require(std::isfinite(beta) && beta > 0.0, "parameters.beta must be > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "parameters.gamma must be > 0");
  require(std::isfinite(d) && d > 0.0, "parameters.d must be > 0");
  require(std::isfinite(d_I) && d_I >= 0.0, "parameters.d_I must be >= 0");
  require(std::isfinite(z_min) && z_min >= 0.0, "parameters.z_min must be >= 0");
  require(std::isfinite(z_max) && z_max > z_min, "parameters.z_max must exceed z_min");
  require(std::isfinite(boost_contact_multiplier) && boost_contact_multiplier >= 0.0,
          "parameters.boost_contact_multiplier must be >= 0");
}

// --- BirthFunction ---------------------------------------------------------

BirthFunction BirthFunction::beverton_holt(double rho, double K) {
  require(std::isfinite(rho) && rho > 0.0, "birth.rho must be > 0");
  require(std::isfinite(K) && K > 0.0, "birth.K must be > 0");
  return BirthFunction(BevertonHolt{rho, K});
}

BirthFunction BirthFunction::tabulated(std::vector<double> population,
                                       std::vector<double> births) {
  require(population.size() >= 2 && population.size() == births.size(),
          "birth.N and birth.b must have equal length >= 2");
  require(population.front() == 0.0 && births.front() == 0.0,
          "birth table must start at (N=0, b=0)");
  for (double v : births) require(std::isfinite(v) && v >= 0.0, "birth.b must be >= 0");
  auto curve = PiecewiseCubic::monotone(std::move(population), std::move(births));
  curve.set_slope(curve.knots().size() - 1, 0.0);
  return BirthFunction(TabulatedBirth{std::move(curve)});
}

double BirthFunction::operator()(double N) const {
  return std::visit(overloaded{
                        [N](const BevertonHolt& f) { return f.rho * N / (1.0 + N / f.K); },
                        [N](const TabulatedBirth& f) {
                          if (N >= f.curve.back()) return f.curve.values().back();
                          return f.curve(std::max(N, 0.0));
                        },
                    },
                    form_);
}

double BirthFunction::derivative(double N) const {
  return std::visit(overloaded{
                        [N](const BevertonHolt& f) {
                          const double u = 1.0 + N / f.K;
                          return f.rho / (u * u);
                        },
                        [N](const TabulatedBirth& f) {
                          if (N >= f.curve.back()) return 0.0;
                          return f.curve.derivative(std::max(N, 0.0));
                        },
                    },
                    form_);
}

double BirthFunction::upper_bound() const {
  return std::visit(overloaded{
                        [](const BevertonHolt& f) { return f.rho * f.K; },
                        [](const TabulatedBirth& f) {
                          auto v = f.curve.values();
                          return *std::max_element(v.begin(), v.end());
                        },
                    },
                    form_);
}

std::string BirthFunction::family() const {
  return std::holds_alternative<BevertonHolt>(form_) ? "beverton_holt" : "tabulated";
}

// --- DecayFunction ---------------------------------------------------------

DecayFunction DecayFunction::constant(double g0) {
  require(std::isfinite(g0), "decay.g0 must be finite");
  return DecayFunction(ConstantDecay{g0});
}

DecayFunction DecayFunction::affine(double a, double c) {
  require(std::isfinite(a) && std::isfinite(c), "decay.a and decay.c must be finite");
  return DecayFunction(AffineDecay{a, c});
}

DecayFunction DecayFunction::power(double a, double q) {
  require(std::isfinite(a) && std::isfinite(q), "decay.a and decay.q must be finite");
  return DecayFunction(PowerDecay{a, q});
}

double DecayFunction::operator()(double z) const {
  return std::visit(overloaded{
                        [](const ConstantDecay& f) { return f.g0; },
                        [z](const AffineDecay& f) { return f.a * z + f.c; },
                        [z](const PowerDecay& f) { return f.a * std::pow(z, f.q); },
                    },
                    form_);
}

double DecayFunction::derivative(double z) const {
  return std::visit(overloaded{
                        [](const ConstantDecay&) { return 0.0; },
                        [](const AffineDecay& f) { return f.a; },
                        [z](const PowerDecay& f) {
                          if (f.q == 0.0) return 0.0;
                          return f.a * f.q * std::pow(z, f.q - 1.0);
                        },
                    },
                    form_);
}

double DecayFunction::flow(double z0, double elapsed) const {
  return std::visit(
      overloaded{
          [&](const ConstantDecay& f) { return z0 - f.g0 * elapsed; },
          [&](const AffineDecay& f) {
            if (f.a == 0.0) return z0 - f.c * elapsed;
            const double decay = std::exp(-f.a * elapsed);
            return z0 * decay + f.c * std::expm1(-f.a * elapsed) / f.a;
          },
          [&](const PowerDecay& f) {
            if (f.q == 1.0) return z0 * std::exp(-f.a * elapsed);
            if (f.q == 0.0) return z0 - f.a * elapsed;
            const double e = 1.0 - f.q;
            return std::pow(std::pow(z0, e) - e * f.a * elapsed, 1.0 / e);
          },
      },
      form_);
}

double DecayFunction::travel_time(double z_hi, double z_lo) const {
  return std::visit(
      overloaded{
          [&](const ConstantDecay& f) { return (z_hi - z_lo) / f.g0; },
          [&](const AffineDecay& f) {
            if (f.a == 0.0) return (z_hi - z_lo) / f.c;
            return std::log1p(f.a * (z_hi - z_lo) / (f.a * z_lo + f.c)) / f.a;
          },
          [&](const PowerDecay& f) {
            if (f.q == 1.0) return std::log(z_hi / z_lo) / f.a;
            if (f.q == 0.0) return (z_hi - z_lo) / f.a;
            const double e = 1.0 - f.q;
            return (std::pow(z_hi, e) - std::pow(z_lo, e)) / (f.a * e);
          },
      },
      form_);
}

double DecayFunction::max_on(double z_lo, double z_hi) const {
  return std::max((*this)(z_lo), (*this)(z_hi));
}

std::string DecayFunction::family() const {
  return std::visit(overloaded{
                        [](const ConstantDecay&) { return std::string("constant"); },
                        [](const AffineDecay&) { return std::string("affine"); },
                        [](const PowerDecay&) { return std::string("power"); },
                    },
                    form_);
}

// --- BoostingKernel --------------------------------------------------------

BoostingKernel::BoostingKernel(Profile c_max, Profile c0, JumpLaw p0, double z_min,
                               double z_max)
    : c_max_(c_max), c0_(c0), p0_(p0), z_min_(z_min), z_max_(z_max) {
  require(z_max > z_min, "kernel domain requires z_max > z_min");
  for (double v : {c_max.at_min, c_max.at_max, c0.at_min, c0.at_max}) {
    if (!std::isfinite(v)) throw KernelError("invalid kernel: non-finite c_max/c0 value");
  }
  if (const auto* e = std::get_if<TruncatedExponentialJump>(&p0_)) {
    if (!(std::isfinite(e->rate) && e->rate > 0.0)) {
      throw KernelError("invalid kernel: truncated_exponential rate must be > 0");
    }
  }
}

BoostingKernel BoostingKernel::no_boost(double z_min, double z_max) {
  return {Profile::constant(0.0), Profile::constant(0.0), UniformJump{}, z_min, z_max};
}

BoostingKernel BoostingKernel::to_maximum(double z_min, double z_max) {
  return {Profile::constant(1.0), Profile::constant(0.0), UniformJump{}, z_min, z_max};
}

double BoostingKernel::p0_cdf(double z_tilde, double z) const {
  const double span = z_max_ - z_tilde;
  if (z >= z_max_) return 1.0;
  if (z <= z_tilde) return 0.0;
  // span > 0 here because z_tilde < z < z_max
  return std::visit(overloaded{
                        [&](const UniformJump&) { return (z - z_tilde) / span; },
                        [&](const TruncatedExponentialJump& e) {
                          return std::expm1(-e.rate * (z - z_tilde)) /
                                 std::expm1(-e.rate * span);
                        },
                    },
                    p0_);
}

double BoostingKernel::p0_density(double z, double z_tilde) const {
  const double span = z_max_ - z_tilde;
  if (z <= z_tilde || z > z_max_ || span <= 0.0) return 0.0;
  return std::visit(overloaded{
                        [&](const UniformJump&) { return 1.0 / span; },
                        [&](const TruncatedExponentialJump& e) {
                          return e.rate * std::exp(-e.rate * (z - z_tilde)) /
                                 (-std::expm1(-e.rate * span));
                        },
                    },
                    p0_);
}

double BoostingKernel::p0_mass(double z_tilde, double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return p0_cdf(z_tilde, hi) - p0_cdf(z_tilde, lo);
}

// --- ImmunityGrid ----------------------------------------------------------

ImmunityGrid ImmunityGrid::uniform(double z_min, double z_max, std::size_t n_cells) {
  require(n_cells >= 1, "grid.n_cells must be >= 1");
  require(z_max > z_min, "grid requires z_max > z_min");
  std::vector<double> edges(n_cells + 1);
  const double h = (z_max - z_min) / static_cast<double>(n_cells);
  for (std::size_t i = 0; i <= n_cells; ++i) edges[i] = z_min + h * static_cast<double>(i);
  edges.back() = z_max;
  return ImmunityGrid(std::move(edges));
}

ImmunityGrid::ImmunityGrid(std::vector<double> edges) : edges_(std::move(edges)) {
  require(edges_.size() >= 2, "grid needs at least one cell");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    require(edges_[i] > edges_[i - 1], "grid edges must be strictly increasing");
  }
}

double ImmunityGrid::min_width() const {
  double w = width(0);
  for (std::size_t i = 1; i < size(); ++i) w = std::min(w, width(i));
  return w;
}

double ImmunityGrid::integrate(std::span<const double> cell_values) const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += cell_values[i] * width(i);
  return total;
}

std::vector<double> cell_averages(const std::function<double(double)>& density,
                                  const ImmunityGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = adaptive_simpson(density, grid.edge(i), grid.edge(i + 1), 1e-12, 1e-300) /
             grid.width(i);
  }
  return out;
}

// --- Validation ------------------------------------------------------------

bool ValidationReport::valid() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

namespace {

double checked(double v, const std::string& what, double at) {
  if (!std::isfinite(v)) {
    throw KernelError("invalid kernel: " + what + " is not finite at " + fmt_num(at));
  }
  return v;
}

AssumptionCheck check_parameters(const ModelParameters& params) {
  AssumptionCheck c{"parameters", true, "ok", std::nullopt};
  try {
    params.validate();
  } catch (const ConfigError& e) {
    c.passed = false;
    c.message = e.what();
  }
  return c;
}

void check_birth(const BirthFunction& b, double d, ValidationReport& report) {
  AssumptionCheck zero{"birth: b(0) = 0", true, "ok", std::nullopt};
  const double b0 = checked(b(0.0), "birth b(N)", 0.0);
  if (b0 != 0.0) {
    zero.passed = false;
    zero.message = "b(0) = " + fmt_num(b0) + " must be 0";
    zero.witness = 0.0;
  }
  report.checks.push_back(zero);

  AssumptionCheck range{"birth: 0 <= b(N) <= b_plus", true, "ok", std::nullopt};
  const double b_plus = b.upper_bound();
  if (!std::isfinite(b_plus)) throw KernelError("invalid kernel: birth bound is not finite");
  for (double N = 1e-6; N <= 1e12; N *= 1.5) {
    const double v = checked(b(N), "birth b(N)", N);
    checked(b.derivative(N), "birth b'(N)", N);
    if (v < 0.0 || v > b_plus * (1.0 + 1e-12)) {
      range.passed = false;
      range.message = "b(N) = " + fmt_num(v) + " outside [0, " + fmt_num(b_plus) + "]";
      range.witness = N;
      break;
    }
  }
  report.checks.push_back(range);

  AssumptionCheck eq{"birth: equilibrium N* with b'(N*) < d", true, "ok", std::nullopt};
  const auto n_star = locate_birth_balance(b, d);
  if (!n_star) {
    eq.passed = false;
    eq.message = "no N* exists: b(N) - dN has no positive sign change";
    report.checks.push_back(eq);
    return;
  }
  report.n_star = *n_star;
  const double ns = *n_star;
  for (double s = 1e-6; s < 1.0 && eq.passed; s *= 1.2) {
    const double N = s * ns;
    if (!(b(N) > d * N)) {
      eq.passed = false;
      eq.message = "b(N) <= dN below N*";
      eq.witness = N;
    }
  }
  for (double s = 1.001; s < 1e4 && eq.passed; s *= 1.2) {
    const double N = s * ns;
    if (!(b(N) < d * N)) {
      eq.passed = false;
      eq.message = "b(N) >= dN above N*";
      eq.witness = N;
    }
  }
  if (eq.passed) {
    const double h = 1e-6 * ns;
    const double slope = (b(ns + h) - b(ns - h)) / (2.0 * h);
    if (!(slope < d)) {
      eq.passed = false;
      eq.message = "b'(N*) = " + fmt_num(slope) + " is not below d";
      eq.witness = ns;
    } else {
      eq.message = "N* = " + fmt_num(ns);
    }
  }
  report.checks.push_back(eq);
}

AssumptionCheck check_decay(const DecayFunction& g, double z_min, double z_max) {
  AssumptionCheck c{"decay: 0 < g(z) < inf", true, "ok", std::nullopt};
  constexpr int kSamples = 256;
  for (int k = 0; k <= kSamples; ++k) {
    const double z = z_min + (z_max - z_min) * k / kSamples;
    const double v = checked(g(z), "decay g(z)", z);
    checked(g.derivative(z), "decay g'(z)", z);
    if (!(v > 0.0)) {
      c.passed = false;
      c.message = "g must be strictly positive (g(" + fmt_num(z) + ") = " + fmt_num(v) + ")";
      c.witness = z;
      break;
    }
  }
  return c;
}

void check_kernel(const BoostingKernel& k, ValidationReport& report) {
  AssumptionCheck probs{"kernel: c_max, c0 >= 0 and c_max + c0 <= 1", true, "ok",
                        std::nullopt};
  constexpr int kSamples = 256;
  for (int i = 0; i <= kSamples; ++i) {
    const double z = k.z_min() + (k.z_max() - k.z_min()) * i / kSamples;
    const double cm = checked(k.c_max(z), "kernel c_max", z);
    const double c0 = checked(k.c0(z), "kernel c0", z);
    if (cm < 0.0 || c0 < 0.0 || cm + c0 > 1.0 + 1e-15) {
      probs.passed = false;
      probs.message = "c_max = " + fmt_num(cm) + ", c0 = " + fmt_num(c0) +
                      " violate 0 <= c_max, c0 and c_max + c0 <= 1";
      probs.witness = z;
      break;
    }
  }
  report.checks.push_back(probs);

  AssumptionCheck norm{"kernel: p0 integrates to 1", true, "ok", std::nullopt};
  if (k.has_continuous_part()) {
    for (int i = 0; i < 8; ++i) {
      const double zt = k.z_min() + (k.z_max() - k.z_min()) * i / 8.0;
      const double mass = adaptive_simpson(
          [&](double z) { return checked(k.p0_density(z, zt), "kernel p0", z); }, zt,
          k.z_max(), 1e-12);
      if (std::abs(mass - 1.0) > 1e-8) {
        norm.passed = false;
        norm.message = "p0 mass " + fmt_num(mass) + " != 1";
        norm.witness = zt;
        break;
      }
    }
  }
  report.checks.push_back(norm);
}

}  // namespace

ValidationReport validate_model(const ModelParameters& params, const BirthFunction& b,
                                const DecayFunction& g, const BoostingKernel& k) {
  ValidationReport report;
  report.checks.push_back(check_parameters(params));
  check_birth(b, params.d, report);
  if (params.z_max > params.z_min) {
    report.checks.push_back(check_decay(g, params.z_min, params.z_max));
  }
  check_kernel(k, report);
  return report;
}

// --- Characteristics -------------------------------------------------------

double transit_time(const DecayFunction& g, double z_min, double z_max) {
  if (!(z_max > z_min)) throw DomainError("transit_time: need z_max > z_min");
  const double T = adaptive_simpson([&](double z) { return 1.0 / g(z); }, z_min, z_max, 1e-10);
  if (!(std::isfinite(T) && T > 0.0)) {
    throw QuadratureError("transit_time: integral of 1/g did not converge to a positive value");
  }
  return T;
}

double flow_characteristic(double z0, double elapsed, const DecayFunction& g, double z_min,
                           double z_max) {
  const double slack = 1e-12 * (z_max - z_min);
  if (z0 < z_min - slack || z0 > z_max + slack) {
    throw DomainError("flow_characteristic: z0 = " + fmt_num(z0) + " outside [" +
                      fmt_num(z_min) + ", " + fmt_num(z_max) + "]");
  }
  if (!(elapsed >= 0.0)) throw DomainError("flow_characteristic: elapsed must be >= 0");
  z0 = std::clamp(z0, z_min, z_max);
  if (elapsed == 0.0) return z0;
  const double exit_time = g.travel_time(z0, z_min);
  if (elapsed > exit_time * (1.0 + 1e-10) + 1e-14) {
    throw DomainError("flow_characteristic: characteristic leaves the domain after " +
                      fmt_num(exit_time) + " time units");
  }
  if (elapsed >= exit_time) return z_min;
  return std::clamp(g.flow(z0, elapsed), z_min, z0);
}

// --- Kernel discretization -------------------------------------------------

double KernelMasses::total() const {
  double s = at_zmax + stay;
  for (double m : per_cell) s += m;
  return s;
}

KernelMasses kernel_cell_masses(const BoostingKernel& k, double z_tilde,
                                const ImmunityGrid& grid) {
  const double slack = 1e-12 * (grid.z_max() - grid.z_min());
  if (z_tilde < grid.z_min() - slack || z_tilde > grid.z_max() + slack) {
    throw DomainError("kernel_cell_masses: z~ outside the grid");
  }
  const double cm = k.c_max(z_tilde);
  const double c0 = k.c0(z_tilde);
  if (!std::isfinite(cm) || !std::isfinite(c0)) {
    throw KernelError("invalid kernel: non-finite coefficient at z~ = " + fmt_num(z_tilde));
  }
  if (cm < 0.0 || c0 < 0.0 || cm + c0 > 1.0 + 1e-15) {
    throw KernelError("kernel invariant violated at z~ = " + fmt_num(z_tilde) +
                      ": c_max + c0 = " + fmt_num(cm + c0) + " > 1");
  }
  KernelMasses out;
  out.at_zmax = cm;
  out.stay = std::max(0.0, 1.0 - cm - c0);
  out.per_cell.assign(grid.size(), 0.0);
  if (c0 > 0.0) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.edge(i + 1) <= z_tilde && i + 1 < grid.size()) continue;
      out.per_cell[i] = c0 * k.p0_mass(z_tilde, grid.edge(i), grid.edge(i + 1));
    }
  }
  return out;
}

}  // namespace immunokinetics
