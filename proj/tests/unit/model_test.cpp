#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "immunokinetics/errors.hpp"
#include "immunokinetics/model.hpp"

using namespace immunokinetics;

namespace {

ModelParameters params(double d = 0.02) {
  ModelParameters p;
  p.beta = 0.3;
  p.gamma = 0.1;
  p.d = d;
  p.z_min = 0.0;
  p.z_max = 10.0;
  return p;
}

BoostingKernel generic_kernel(double z_min, double z_max) {
  return BoostingKernel({0.1, 0.3}, {0.4, 0.2}, TruncatedExponentialJump{0.7}, z_min, z_max);
}

}  // namespace

TEST(ModelParameters, RejectsBadValues) {
  auto p = params();
  EXPECT_NO_THROW(p.validate());
  p.beta = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = params();
  p.d_I = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = params();
  p.z_max = p.z_min;
  EXPECT_THROW(p.validate(), ConfigError);
  p = params();
  p.boost_contact_multiplier = -0.5;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(BirthFunction, BevertonHoltValueAndDerivative) {
  const auto b = BirthFunction::beverton_holt(0.04, 1000);
  EXPECT_DOUBLE_EQ(b(0.0), 0.0);
  EXPECT_NEAR(b(1000.0), 0.04 * 1000 / 2, 1e-12);
  const double h = 1e-4;
  EXPECT_NEAR(b.derivative(500.0), (b(500 + h) - b(500 - h)) / (2 * h), 1e-9);
  EXPECT_NEAR(b.upper_bound(), 40.0, 1e-12);
}

TEST(BirthFunction, TabulatedHeldConstantBeyondTable) {
  const auto b = BirthFunction::tabulated({0, 100, 200}, {0, 5, 6});
  EXPECT_NEAR(b(100.0), 5.0, 1e-12);
  EXPECT_NEAR(b(500.0), 6.0, 1e-12);
  EXPECT_NEAR(b.derivative(200.0), 0.0, 1e-12);
  EXPECT_THROW(BirthFunction::tabulated({1, 2}, {0, 1}), ConfigError);
}

TEST(ValidateModel, BevertonHoltHasEquilibrium) {
  const auto p = params(0.02);
  const auto rep = validate_model(p, BirthFunction::beverton_holt(0.04, 1000),
                                  DecayFunction::constant(0.5),
                                  BoostingKernel::no_boost(p.z_min, p.z_max));
  ASSERT_TRUE(rep.valid());
  ASSERT_TRUE(rep.n_star.has_value());
  // closed form K (rho / d - 1)
  EXPECT_NEAR(*rep.n_star, 1000.0, 1e-9 * 1000.0);
  const auto b = BirthFunction::beverton_holt(0.04, 1000);
  EXPECT_LE(std::abs(b(*rep.n_star) - p.d * *rep.n_star), 1e-9 * p.d * *rep.n_star);
}

TEST(ValidateModel, NoEquilibriumReported) {
  const auto p = params(0.02);
  const auto rep = validate_model(p, BirthFunction::beverton_holt(0.02, 1000),
                                  DecayFunction::constant(0.5),
                                  BoostingKernel::no_boost(p.z_min, p.z_max));
  ASSERT_FALSE(rep.valid());
  EXPECT_NE(rep.first_failure()->message.find("no N* exists"), std::string::npos);
}

TEST(ValidateModel, ZeroDecayRejected) {
  const auto p = params(0.02);
  const auto rep = validate_model(p, BirthFunction::beverton_holt(0.04, 1000),
                                  DecayFunction::constant(0.0),
                                  BoostingKernel::no_boost(p.z_min, p.z_max));
  ASSERT_FALSE(rep.valid());
  EXPECT_NE(rep.first_failure()->message.find("g must be strictly positive"), std::string::npos);
}

TEST(ValidateModel, OverfullKernelRejected) {
  const auto p = params(0.02);
  const BoostingKernel k({0.7, 0.7}, {0.5, 0.5}, UniformJump{}, p.z_min, p.z_max);
  const auto rep = validate_model(p, BirthFunction::beverton_holt(0.04, 1000),
                                  DecayFunction::constant(0.5), k);
  EXPECT_FALSE(rep.valid());
}

TEST(TransitTime, ClosedForms) {
  EXPECT_NEAR(transit_time(DecayFunction::constant(0.5), 0.0, 10.0), 20.0, 1e-12);
  EXPECT_NEAR(transit_time(DecayFunction::power(1.0, 1.0), 1.0, std::exp(1.0)), 1.0, 1e-9);
  EXPECT_NEAR(transit_time(DecayFunction::affine(1.0, 1.0), 0.0, 1.0), std::log(2.0), 1e-9);
}

TEST(FlowCharacteristic, Examples) {
  const auto g = DecayFunction::constant(0.5);
  EXPECT_NEAR(flow_characteristic(10.0, 4.0, g, 0.0, 10.0), 8.0, 1e-14);
  EXPECT_NEAR(flow_characteristic(10.0, 20.0, g, 0.0, 10.0), 0.0, 1e-12);
  const double e = std::exp(1.0);
  EXPECT_NEAR(flow_characteristic(e, 1.0, DecayFunction::power(1.0, 1.0), 1.0, e), 1.0, 1e-12);
  EXPECT_THROW(flow_characteristic(10.0, 21.0, g, 0.0, 10.0), DomainError);
  EXPECT_THROW(flow_characteristic(11.0, 1.0, g, 0.0, 10.0), DomainError);
}

TEST(FlowCharacteristic, SemigroupProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DecayFunction laws[] = {DecayFunction::constant(0.7), DecayFunction::affine(0.3, 0.2),
                                DecayFunction::power(0.5, 1.5)};
  const double z_min = 0.5, z_max = 6.0;
  for (const auto& g : laws) {
    for (int k = 0; k < 200; ++k) {
      const double z0 = z_min + (z_max - z_min) * u(rng);
      const double total = g.travel_time(z0, z_min);
      const double s = total * 0.5 * u(rng);
      const double t = total * 0.5 * u(rng);
      const double a = flow_characteristic(flow_characteristic(z0, s, g, z_min, z_max), t, g,
                                           z_min, z_max);
      const double b = flow_characteristic(z0, s + t, g, z_min, z_max);
      EXPECT_NEAR(a, b, 1e-9);
    }
  }
}

TEST(FlowCharacteristic, TransitTimeMapsTopToBottom) {
  const DecayFunction laws[] = {DecayFunction::constant(0.7), DecayFunction::affine(0.3, 0.2),
                                DecayFunction::power(0.5, 1.5)};
  for (const auto& g : laws) {
    const double T = transit_time(g, 0.5, 6.0);
    EXPECT_NEAR(flow_characteristic(6.0, T, g, 0.5, 6.0), 0.5, 1e-6);
    EXPECT_NEAR(g.travel_time(6.0, 0.5), T, 1e-6);
  }
}

TEST(KernelCellMasses, BoostToMaximum) {
  const auto grid = ImmunityGrid::uniform(0.0, 1.0, 10);
  const auto m = kernel_cell_masses(BoostingKernel::to_maximum(0.0, 1.0), 0.35, grid);
  EXPECT_EQ(m.at_zmax, 1.0);
  EXPECT_EQ(m.stay, 0.0);
  for (double v : m.per_cell) EXPECT_EQ(v, 0.0);
}

TEST(KernelCellMasses, NoBoost) {
  const auto grid = ImmunityGrid::uniform(0.0, 1.0, 10);
  const auto m = kernel_cell_masses(BoostingKernel::no_boost(0.0, 1.0), 0.35, grid);
  EXPECT_EQ(m.at_zmax, 0.0);
  EXPECT_EQ(m.stay, 1.0);
  for (double v : m.per_cell) EXPECT_EQ(v, 0.0);
}

TEST(KernelCellMasses, UniformJumpFromCellEdge) {
  const auto grid = ImmunityGrid::uniform(0.0, 2.0, 20);
  const BoostingKernel k(Profile::constant(0.0), Profile::constant(1.0), UniformJump{}, 0.0, 2.0);
  const double zt = grid.edge(8);  // 0.8
  const auto m = kernel_cell_masses(k, zt, grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // each cell above z~ holds dz / (z_max - z~); cross-checked by midpoint quadrature
    const double closed = i >= 8 ? grid.width(i) / (2.0 - zt) : 0.0;
    double midpoint = 0.0;
    const int n = 1000;
    for (int q = 0; q < n; ++q) {
      const double z = grid.edge(i) + (q + 0.5) * grid.width(i) / n;
      midpoint += k.p0_density(z, zt) * grid.width(i) / n;
    }
    EXPECT_NEAR(m.per_cell[i], closed, 1e-12);
    EXPECT_NEAR(midpoint, closed, 1e-9);
    sum += m.per_cell[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(KernelCellMasses, SumToOneRandomized) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double z_min = u(rng);
    const double z_max = z_min + 0.1 + 5 * u(rng);
    const auto grid = ImmunityGrid::uniform(z_min, z_max, 5 + static_cast<std::size_t>(200 * u(rng)));
    const double a = 0.5 * u(rng), b = 0.5 * u(rng);
    const BoostingKernel::JumpLaw law =
        u(rng) < 0.5 ? BoostingKernel::JumpLaw{UniformJump{}}
                     : BoostingKernel::JumpLaw{TruncatedExponentialJump{0.1 + 5 * u(rng)}};
    const BoostingKernel kern({a, b}, {0.5 * u(rng), 0.5 * u(rng)}, law, z_min, z_max);
    const double zt = z_min + (z_max - z_min) * u(rng);
    EXPECT_NEAR(kernel_cell_masses(kern, zt, grid).total(), 1.0, 1e-12);
  }
}

TEST(KernelCellMasses, TopEdgeSendsContinuousMassToTopCell) {
  const auto grid = ImmunityGrid::uniform(0.0, 1.0, 4);
  const auto k = generic_kernel(0.0, 1.0);
  const auto m = kernel_cell_masses(k, 1.0, grid);
  EXPECT_NEAR(m.per_cell.back(), k.c0(1.0), 1e-15);
  EXPECT_NEAR(m.total(), 1.0, 1e-12);
}

TEST(KernelCellMasses, OverfullKernelThrows) {
  const auto grid = ImmunityGrid::uniform(0.0, 1.0, 4);
  const BoostingKernel k({0.8, 0.8}, {0.5, 0.5}, UniformJump{}, 0.0, 1.0);
  EXPECT_THROW(kernel_cell_masses(k, 0.3, grid), KernelError);
}

TEST(ImmunityGrid, CellAveragesIntegrateDensity) {
  const auto grid = ImmunityGrid::uniform(0.0, 2.0, 37);
  const auto avg = cell_averages([](double z) { return z * z; }, grid);
  EXPECT_NEAR(grid.integrate(avg), 8.0 / 3.0, 1e-12);
}
