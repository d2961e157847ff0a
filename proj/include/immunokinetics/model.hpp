#pragma once

// Domain types shared by every solver: rates, the three functional
// ingredients (birth, immunity decay, boosting kernel), the immunity grid and
// the simulated state.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "immunokinetics/numerics.hpp"

namespace immunokinetics {

struct ModelParameters {
  double beta = 0.0;     // transmission rate
  double gamma = 0.0;    // recovery rate
  double d = 0.0;        // natural death rate
  double d_I = 0.0;      // disease-induced death rate
  double z_min = 0.0;    // immunity level at which hosts become susceptible again
  double z_max = 1.0;    // immunity level right after recovery
  double boost_contact_multiplier = 1.0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Birth function b(N)

struct BevertonHolt {
  double rho;  // maximal per-capita birth rate
  double K;    // scale population
};

struct TabulatedBirth {
  PiecewiseCubic curve;  // monotone C1 interpolant of the samples
};

class BirthFunction {
 public:
  /// b(N) = rho * N / (1 + N / K)
  static BirthFunction beverton_holt(double rho, double K);
  /// Samples must start at (0, 0). Beyond the last sample b is held constant;
  /// the end slope is pinned to zero so the extension stays C1.
  static BirthFunction tabulated(std::vector<double> population, std::vector<double> births);

  double operator()(double N) const;
  double derivative(double N) const;
  /// Finite bound b_+ on [0, inf).
  double upper_bound() const;
  std::string family() const;

  const std::variant<BevertonHolt, TabulatedBirth>& form() const { return form_; }

 private:
  explicit BirthFunction(std::variant<BevertonHolt, TabulatedBirth> f) : form_(std::move(f)) {}
  std::variant<BevertonHolt, TabulatedBirth> form_;
};

// ---------------------------------------------------------------------------
// Decay speed g(z). Immunity moves as dz/dt = -g(z), g > 0.

struct ConstantDecay {
  double g0;
};
struct AffineDecay {
  double a, c;  // g(z) = a z + c
};
struct PowerDecay {
  double a, q;  // g(z) = a z^q
};

class DecayFunction {
 public:
  static DecayFunction constant(double g0);
  static DecayFunction affine(double a, double c);
  static DecayFunction power(double a, double q);

  double operator()(double z) const;
  double derivative(double z) const;

  /// Closed-form position after `elapsed` time units starting from z0,
  /// following dz/dt = -g(z). No domain checks.
  double flow(double z0, double elapsed) const;
  /// Closed-form time to travel from z_hi down to z_lo (z_lo <= z_hi).
  double travel_time(double z_hi, double z_lo) const;
  /// max over [z_lo, z_hi]; every family is monotone so endpoints suffice.
  double max_on(double z_lo, double z_hi) const;

  std::string family() const;
  const std::variant<ConstantDecay, AffineDecay, PowerDecay>& form() const { return form_; }

 private:
  explicit DecayFunction(std::variant<ConstantDecay, AffineDecay, PowerDecay> f)
      : form_(f) {}
  std::variant<ConstantDecay, AffineDecay, PowerDecay> form_;
};

// ---------------------------------------------------------------------------
// Boosting kernel p(z, z~) = c_max(z~) [atom at z_max] + c0(z~) p0(z, z~)
//                           + c1(z~) [atom at z~]

/// Linear profile on [z_min, z_max]; constant when both ends agree.
struct Profile {
  double at_min = 0.0;
  double at_max = 0.0;

  static Profile constant(double v) { return {v, v}; }
  double operator()(double z, double z_min, double z_max) const {
    const double s = (z - z_min) / (z_max - z_min);
    return at_min + (at_max - at_min) * s;
  }
  bool is_zero() const { return at_min == 0.0 && at_max == 0.0; }
};

struct UniformJump {};
struct TruncatedExponentialJump {
  double rate;  // lambda > 0
};

class BoostingKernel {
 public:
  using JumpLaw = std::variant<UniformJump, TruncatedExponentialJump>;

  BoostingKernel(Profile c_max, Profile c0, JumpLaw p0, double z_min, double z_max);

  /// c_max = c0 = 0: boosting never changes the immunity level.
  static BoostingKernel no_boost(double z_min, double z_max);
  /// c_max = 1: every boost restores z_max (model M2).
  static BoostingKernel to_maximum(double z_min, double z_max);

  double c_max(double z_tilde) const { return c_max_(z_tilde, z_min_, z_max_); }
  double c0(double z_tilde) const { return c0_(z_tilde, z_min_, z_max_); }
  double c1(double z_tilde) const { return 1.0 - c_max(z_tilde) - c0(z_tilde); }

  /// Density of the continuous jump law at z given the pre-boost level z~.
  double p0_density(double z, double z_tilde) const;
  /// Continuous jump-law probability of landing in [lo, hi] ∩ (z~, z_max].
  double p0_mass(double z_tilde, double lo, double hi) const;

  bool has_continuous_part() const { return !c0_.is_zero(); }
  bool is_no_boost() const { return c_max_.is_zero() && c0_.is_zero(); }

  const Profile& c_max_profile() const { return c_max_; }
  const Profile& c0_profile() const { return c0_; }
  const JumpLaw& jump_law() const { return p0_; }
  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }

 private:
  double p0_cdf(double z_tilde, double z) const;

  Profile c_max_;
  Profile c0_;
  JumpLaw p0_;
  double z_min_;
  double z_max_;
};

// ---------------------------------------------------------------------------

class ImmunityGrid {
 public:
  static ImmunityGrid uniform(double z_min, double z_max, std::size_t n_cells);
  explicit ImmunityGrid(std::vector<double> edges);

  std::size_t size() const { return edges_.size() - 1; }
  double edge(std::size_t i) const { return edges_[i]; }
  double center(std::size_t i) const { return 0.5 * (edges_[i] + edges_[i + 1]); }
  double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
  double z_min() const { return edges_.front(); }
  double z_max() const { return edges_.back(); }
  double min_width() const;
  std::span<const double> edges() const { return edges_; }

  /// Sum of cell values times widths.
  double integrate(std::span<const double> cell_values) const;

 private:
  std::vector<double> edges_;
};

/// Cell averages of a density function, by adaptive quadrature per cell.
std::vector<double> cell_averages(const std::function<double(double)>& density,
                                  const ImmunityGrid& grid);

struct State {
  double S = 0.0;
  double I = 0.0;
  std::vector<double> r;  // cell-average immune density

  double R(const ImmunityGrid& grid) const { return grid.integrate(r); }
  double N(const ImmunityGrid& grid) const { return S + I + R(grid); }
};

enum class ModelTag { M1, M2 };

struct TrajectorySample {
  double t = 0.0;
  State state;
  double Lambda = 0.0;  // g(z_min) r(t, z_min): immunity-loss flux
  double B = 0.0;       // inflow at z_max
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  ImmunityGrid grid = ImmunityGrid::uniform(0.0, 1.0, 1);
  ModelTag model = ModelTag::M1;
};

// ---------------------------------------------------------------------------
// Operations

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string message;
  std::optional<double> witness;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  std::optional<double> n_star;

  bool valid() const;
  /// First failed check, if any.
  const AssumptionCheck* first_failure() const;
};

/// Checks parameter ranges and the birth, decay and kernel assumptions
/// numerically. Failures are reported, not thrown; a non-finite function
/// value throws KernelError naming the offending input.
ValidationReport validate_model(const ModelParameters& params, const BirthFunction& b,
                                const DecayFunction& g, const BoostingKernel& k);

/// Time needed to decay from z_max to z_min without boosting.
double transit_time(const DecayFunction& g, double z_min, double z_max);

/// Position of a host at level z0 after `elapsed` time units without boosting.
/// Throws DomainError if z0 is outside [z_min, z_max], elapsed < 0, or the
/// characteristic would leave the domain through z_min.
double flow_characteristic(double z0, double elapsed, const DecayFunction& g, double z_min,
                           double z_max);

struct KernelMasses {
  double at_zmax = 0.0;
  std::vector<double> per_cell;
  double stay = 0.0;

  double total() const;
};

/// Where a boost starting at z~ sends its probability mass on `grid`.
KernelMasses kernel_cell_masses(const BoostingKernel& k, double z_tilde,
                                const ImmunityGrid& grid);

}  // namespace immunokinetics
