#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "immunokinetics/equilibria.hpp"
#include "immunokinetics/errors.hpp"
#include "immunokinetics/simulator.hpp"

using namespace immunokinetics;

namespace {

ModelParameters rates(double beta, double gamma, double d, double d_I) {
  ModelParameters p;
  p.beta = beta;
  p.gamma = gamma;
  p.d = d;
  p.d_I = d_I;
  p.z_min = 0.0;
  p.z_max = 5.0;
  return p;
}

}  // namespace

TEST(FindNStar, BevertonHoltClosedForm) {
  EXPECT_NEAR(find_n_star(BirthFunction::beverton_holt(0.04, 1000), 0.02), 1000.0, 1e-9 * 1000);
  EXPECT_NEAR(find_n_star(BirthFunction::beverton_holt(0.03, 500), 0.01), 1000.0, 1e-9 * 1000);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double d = 0.001 + 0.1 * u(rng);
    const double rho = d * (1.05 + 10 * u(rng));
    const double K = std::pow(10.0, 6 * u(rng) - 2);
    const double closed = K * (rho / d - 1.0);
    EXPECT_NEAR(find_n_star(BirthFunction::beverton_holt(rho, K), d), closed, 1e-9 * closed);
  }
}

TEST(FindNStar, NoEquilibrium) {
  EXPECT_THROW(find_n_star(BirthFunction::beverton_holt(0.02, 1000), 0.02), NoEquilibriumError);
  EXPECT_THROW(find_n_star(BirthFunction::beverton_holt(0.01, 1000), 0.02), NoEquilibriumError);
}

TEST(ReproductionNumbers, Examples) {
  EXPECT_NEAR(compute_r0(rates(0.3, 0.1, 0.02, 0.08)), 1.5, 1e-14);
  EXPECT_NEAR(compute_r0(rates(0.3, 0.1, 0.02, 0.0)), 2.5, 1e-14);
  EXPECT_NEAR(compute_r0_tilde(rates(0.3, 0.1, 0.02, 0.0)), 2.5, 1e-14);
  EXPECT_NEAR(compute_r0_tilde(rates(0.08, 0.09, 0.01, 0.0)), 0.8, 1e-14);
}

TEST(ClassifyDfe, Examples) {
  EXPECT_EQ(classify_dfe(rates(0.08, 0.09, 0.01, 0.0)), Classification::globally_stable);
  EXPECT_EQ(classify_dfe(rates(0.3, 0.1, 0.02, 0.08)), Classification::unstable);
  // R0 = 0.9, R0~ = 1.2
  const double beta = 0.12, gamma = 0.09, d = 0.01;
  const double d_I = beta / 0.9 - gamma - d;
  EXPECT_NEAR(compute_r0_tilde(rates(beta, gamma, d, d_I)), 1.2, 1e-12);
  EXPECT_EQ(classify_dfe(rates(beta, gamma, d, d_I)), Classification::locally_stable);
  EXPECT_EQ(classify_dfe(rates(0.2, 0.1, 0.02, 0.08)), Classification::threshold_inconclusive);
}

TEST(ClassifyDfe, MonotoneInBeta) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double gamma = 0.01 + u(rng), d = 0.001 + 0.1 * u(rng), d_I = 0.5 * u(rng);
    int last = -1;
    for (double beta = 0.01; beta < 3.0; beta *= 1.1) {
      const auto c = classify_dfe(rates(beta, gamma, d, d_I));
      const int rank = c == Classification::globally_stable  ? 0
                       : c == Classification::locally_stable ? 1
                                                              : 2;
      EXPECT_GE(rank, last);
      last = rank;
      EXPECT_LE(compute_r0(rates(beta, gamma, d, d_I)), compute_r0_tilde(rates(beta, gamma, d, d_I)));
    }
  }
}

TEST(LinearGrowthRate, Examples) {
  EXPECT_NEAR(linear_growth_rate(rates(0.3, 0.1, 0.02, 0.08)), 0.10, 1e-15);
  EXPECT_NEAR(linear_growth_rate(rates(0.2, 0.1, 0.02, 0.08)), 0.0, 1e-15);
}

TEST(LinearGrowthRate, MatchesEarlyLogSlope) {
  const auto p = rates(0.3, 0.1, 0.02, 0.08);
  const auto b = BirthFunction::beverton_holt(0.04, 1000);
  const double N_star = find_n_star(b, p.d);
  auto grid = ImmunityGrid::uniform(p.z_min, p.z_max, 100);
  SimulationConfig cfg{p,  b, DecayFunction::constant(0.5),
                       BoostingKernel({0.1, 0.1}, {0.2, 0.2}, UniformJump{}, p.z_min, p.z_max),
                       grid, 0.01, 60.0, State{N_star, 1e-6 * N_star, std::vector<double>(100, 0.0)},
                       ModelTag::M1, 10};
  const auto traj = simulate(cfg);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto& s : traj.samples) {
    if (s.t < 5.0 || s.state.I >= 1e-3 * N_star) continue;
    const double y = std::log(s.state.I);
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
    n += 1;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, linear_growth_rate(p), 0.05 * linear_growth_rate(p));
}

TEST(StationaryProfile, DiseaseFreeIsZero) {
  const auto p = rates(0.3, 0.1, 0.02, 0.08);
  const auto grid = ImmunityGrid::uniform(p.z_min, p.z_max, 40);
  const auto r = stationary_r_profile(p, DecayFunction::constant(0.5), grid);
  ASSERT_EQ(r.size(), 40u);
  for (double v : r) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(stationary_r_profile(p, DecayFunction::constant(0.5), grid, 1.0), DomainError);
}

TEST(EquilibriumReport, Assembles) {
  const auto rep = equilibrium_report(rates(0.08, 0.09, 0.01, 0.0), BirthFunction::beverton_holt(0.04, 1000));
  EXPECT_NEAR(rep.N_star, 3000.0, 1e-9 * 3000);
  EXPECT_EQ(rep.S_star, rep.N_star);
  EXPECT_EQ(rep.classification, Classification::globally_stable);
  EXPECT_EQ(to_string(rep.classification), "globally_stable");
}
