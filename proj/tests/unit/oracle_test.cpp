#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "immunokinetics/errors.hpp"
#include "immunokinetics/m2_oracle.hpp"
#include "immunokinetics/scenario.hpp"
#include "immunokinetics/simulator.hpp"

using namespace immunokinetics;

namespace {

PiecewiseCubic constant_history(double value, double t_end) {
  return PiecewiseCubic::smooth({0.0, 0.5 * t_end, t_end}, {value, value, value});
}

CharacteristicInputs quiet_inputs(double B, double d, DecayFunction g, double z_min, double z_max,
                                  std::function<double(double)> psi) {
  CharacteristicInputs in;
  in.infected_fraction = constant_history(0.0, 100.0);
  in.inflow = constant_history(B, 100.0);
  in.d = d;
  in.boost_rate = 0.4;
  in.g = g;
  in.z_min = z_min;
  in.z_max = z_max;
  in.psi = std::move(psi);
  return in;
}

}  // namespace

TEST(BacktraceEmissionTime, Examples) {
  const auto g = DecayFunction::constant(0.5);
  EXPECT_NEAR(*backtrace_emission_time(8.0, 8.0, g, 0.0, 10.0), 4.0, 1e-11);
  EXPECT_EQ(*backtrace_emission_time(3.0, 10.0, g, 0.0, 10.0), 3.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(*backtrace_emission_time(2.0, 1.0, DecayFunction::power(1.0, 1.0), 0.5, e), 1.0,
              1e-11);
}

TEST(BacktraceEmissionTime, PreInitialCohort) {
  const auto g = DecayFunction::constant(0.5);
  EXPECT_FALSE(backtrace_emission_time(2.0, 5.0, g, 0.0, 10.0).has_value());
}

TEST(BacktraceEmissionTime, InverseOfFlow) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto g = DecayFunction::affine(0.3, 0.1);
  const double z_min = 0.0, z_max = 4.0;
  const double T = transit_time(g, z_min, z_max);
  for (int k = 0; k < 100; ++k) {
    const double elapsed = T * u(rng);
    const double t = elapsed + 5.0 * u(rng);
    const double z = flow_characteristic(z_max, elapsed, g, z_min, z_max);
    EXPECT_NEAR(*backtrace_emission_time(t, z, g, z_min, z_max), t - elapsed, 1e-8);
  }
}

TEST(ExactRm2, PureTransportBranch) {
  const double d = 0.03, g0 = 0.5;
  const auto psi = [](double z) { return 1.0 + std::cos(z); };
  const auto in = quiet_inputs(0.7, d, DecayFunction::constant(g0), 0.0, 10.0, psi);
  for (double z : {0.5, 2.0, 5.9}) {
    const double t = 8.0;  // zeta(t) = 10 - 4 = 6
    EXPECT_NEAR(exact_r_m2(t, z, in), psi(z + g0 * t) * std::exp(-d * t), 1e-9);
  }
}

TEST(ExactRm2, BoundaryBranch) {
  const double d = 0.03, g0 = 0.5, B = 0.7;
  const auto in = quiet_inputs(B, d, DecayFunction::constant(g0), 0.0, 10.0, [](double) { return 1.0; });
  for (double z : {6.5, 8.0, 10.0}) {
    const double t = 8.0;
    const double t_star = t - (10.0 - z) / g0;
    EXPECT_NEAR(exact_r_m2(t, z, in), B / g0 * std::exp(-d * (t - t_star)), 1e-9);
  }
}

TEST(ExactRm2, BranchesJoinForMatchingData) {
  const double d = 0.02, g0 = 0.5, B = 0.7;
  // psi(z_max) = B / g(z_max)
  const auto in = quiet_inputs(B, d, DecayFunction::constant(g0), 0.0, 10.0,
                               [&](double z) { return B / g0 + 0.1 * (10.0 - z); });
  const double t = 6.0;
  const double zeta = 10.0 - g0 * t;
  EXPECT_NEAR(exact_r_m2(t, zeta - 1e-9, in), exact_r_m2(t, zeta + 1e-9, in), 1e-7);
}

TEST(ExactRm2, NonnegativeForNonnegativeData) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = quiet_inputs(0.3, 0.02, DecayFunction::affine(0.2, 0.1), 0.0, 5.0,
                               [](double z) { return z * z; });
  for (int k = 0; k < 100; ++k) {
    EXPECT_GE(exact_r_m2(30.0 * u(rng), 5.0 * u(rng), in), 0.0);
  }
}

TEST(ExactRm2, ShortHistoryRejected) {
  const auto in = quiet_inputs(0.3, 0.02, DecayFunction::constant(1.0), 0.0, 5.0,
                               [](double) { return 1.0; });
  EXPECT_THROW(exact_r_m2(150.0, 1.0, in), DomainError);
}

// With z-dependent decay the loss rate carries -g'(z); a sign slip would put
// a factor exp(2 g' t) = e^2 between the two solutions below.
TEST(ExactRm2, AgreesWithFineFiniteVolumeForVaryingDecay) {
  ModelParameters p;
  p.beta = 0.3;
  p.gamma = 0.1;
  p.d = 0.02;
  p.z_min = 0.0;
  p.z_max = 5.0;
  const auto g = DecayFunction::affine(0.2, 0.1);
  // vanishes smoothly at z_max, matching the zero inflow, so no front is carried
  const auto psi = [](double z) { return std::pow(std::sin(M_PI * z / 5.0), 2); };
  const std::size_t cells = 1600;
  auto grid = ImmunityGrid::uniform(p.z_min, p.z_max, cells);
  SimulationConfig cfg{p,  BirthFunction::beverton_holt(0.04, 1000), g,
                       BoostingKernel::to_maximum(p.z_min, p.z_max), grid,
                       {}, 5.0, State{900.0, 0.0, cell_averages(psi, grid)},
                       ModelTag::M2, 1};
  const auto traj = simulate(cfg);
  const auto in = characteristic_inputs_from(traj, p, g, psi);
  double err = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double exact = exact_r_m2(5.0, grid.center(i), in);
    err += std::abs(traj.samples.back().state.r[i] - exact) * grid.width(i);
    mass += exact * grid.width(i);
  }
  EXPECT_LT(err / mass, 1e-2);
}

TEST(NoBoostExact, NothingArrivesBeforeTransit) {
  ModelParameters p;
  p.beta = 0.3;
  p.gamma = 0.1;
  p.d = 0.01;
  p.z_min = 0.0;
  p.z_max = 10.0;
  const auto g = DecayFunction::constant(0.5);  // tau = 20
  const auto I = constant_history(7.0, 60.0);
  EXPECT_EQ(no_boost_exact(15.0, 0.0, I, [](double) { return 0.0; }, p, g), 0.0);
}

TEST(NoBoostExact, ConstantHistoryOutflow) {
  ModelParameters p;
  p.beta = 0.3;
  p.gamma = 0.1;
  p.d = 0.01;
  p.z_min = 0.0;
  p.z_max = 10.0;
  const auto g = DecayFunction::constant(0.5);
  const double tau = 20.0, I0 = 7.0;
  const auto I = constant_history(I0, 60.0);
  const double Lambda = g(0.0) * no_boost_exact(35.0, 0.0, I, [](double) { return 0.0; }, p, g);
  EXPECT_NEAR(Lambda, p.gamma * I0 * std::exp(-p.d * tau), 1e-9);
}
