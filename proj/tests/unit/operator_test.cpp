#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "immunokinetics/errors.hpp"
#include "immunokinetics/operator_check.hpp"

using namespace immunokinetics;

namespace {

ModelParameters op_params() {
  ModelParameters p;
  p.beta = 0.3;
  p.gamma = 0.1;
  p.d = 0.02;
  p.z_min = 0.0;
  p.z_max = 4.0;
  return p;
}

const ImmunityGrid kGrid = ImmunityGrid::uniform(0.0, 4.0, 40);

AbstractOperator make_op(const BoostingKernel& k) {
  return AbstractOperator(op_params(), BirthFunction::beverton_holt(0.04, 1000), k, kGrid);
}

BoostingKernel generic() {
  return BoostingKernel({0.2, 0.1}, {0.3, 0.5}, TruncatedExponentialJump{0.8}, 0.0, 4.0);
}

double max_abs(const AbstractPoint& x) {
  double m = std::max(std::abs(x.x1), std::abs(x.x2));
  for (double v : x.x3) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(EvalQ, NoInfectedGivesBirthsOnly) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(1);
  AbstractPoint x = random_point(kGrid, rng, true);
  x.x2 = 0.0;
  const auto q = op.eval_q(x);
  EXPECT_DOUBLE_EQ(q.x1, BirthFunction::beverton_holt(0.04, 1000)(x.hat(kGrid)));
  EXPECT_EQ(q.x2, 0.0);
  for (double v : q.x3) EXPECT_EQ(v, 0.0);
}

TEST(EvalQ, IncidenceArithmetic) {
  const auto op = make_op(generic());
  const AbstractPoint x{1.0, 1.0, std::vector<double>(kGrid.size(), 0.0)};
  const auto q = op.eval_q(x);
  EXPECT_DOUBLE_EQ(q.x2, 0.15);
  EXPECT_DOUBLE_EQ(q.x1, BirthFunction::beverton_holt(0.04, 1000)(2.0) - 0.15);
}

TEST(EvalQ, NoBoostKernelLeavesImmunesAlone) {
  const auto op = make_op(BoostingKernel::no_boost(0.0, 4.0));
  std::mt19937_64 rng(2);
  const auto q = op.eval_q(random_point(kGrid, rng, true));
  for (double v : q.x3) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(EvalQ, BoostingConservesImmuneMass) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(3);
  const auto q = op.eval_q(random_point(kGrid, rng, true));
  EXPECT_NEAR(kGrid.integrate(q.x3), 0.0, 1e-14);
}

TEST(EvalQ, DegeneratePointRejected) {
  const auto op = make_op(generic());
  const AbstractPoint zero{0.0, 0.0, std::vector<double>(kGrid.size(), 0.0)};
  EXPECT_THROW(op.eval_q(zero), DomainError);
  AbstractPoint cancel{1.0, -1.0, std::vector<double>(kGrid.size(), 0.0)};
  EXPECT_THROW(op.eval_q(cancel), DomainError);
}

TEST(EvalDq, ZeroDirection) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(4);
  const auto x = random_point(kGrid, rng, true);
  const AbstractPoint w{0.0, 0.0, std::vector<double>(kGrid.size(), 0.0)};
  EXPECT_EQ(max_abs(op.eval_dq(x, w)), 0.0);
}

TEST(EvalDq, NoInfectedNoInfectedDirection) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(5);
  auto x = random_point(kGrid, rng, true);
  auto w = random_point(kGrid, rng, false);
  x.x2 = 0.0;
  w.x2 = 0.0;
  for (double v : op.eval_dq(x, w).x3) EXPECT_EQ(v, 0.0);
}

TEST(EvalDq, LinearInDirection) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_point(kGrid, rng, true);
    const auto w1 = random_point(kGrid, rng, false);
    const auto w2 = random_point(kGrid, rng, false);
    const double alpha = 2.5;
    const auto lhs = op.eval_dq(x, axpy(w2, alpha, w1));
    const auto rhs = axpy(op.eval_dq(x, w2), alpha, op.eval_dq(x, w1));
    EXPECT_LE(max_abs(axpy(lhs, -1.0, rhs)), 1e-12 * std::max(1.0, max_abs(lhs)));
  }
}

TEST(FdDirectional, ForwardSlopeIsOne) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(7);
  const std::vector<double> hs{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  for (int k = 0; k < 10; ++k) {
    const auto x = random_point(kGrid, rng, true);
    const auto w = random_point(kGrid, rng, false);
    EXPECT_NEAR(op.fd_slope(x, w, hs), 1.0, 0.1);
  }
}

TEST(FdDirectional, CentredSlopeIsTwo) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(8);
  const std::vector<double> hs{1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3};
  for (int k = 0; k < 10; ++k) {
    const auto x = random_point(kGrid, rng, true);
    const auto w = random_point(kGrid, rng, false);
    EXPECT_NEAR(op.fd_slope(x, w, hs, true), 2.0, 0.1);
  }
}

TEST(FdDirectional, BilinearIncidenceLimit) {
  // With b linear (tiny N relative to K) the incidence part of DQ2 is matched
  // by Richardson extrapolation of forward differences.
  const AbstractOperator op(op_params(), BirthFunction::beverton_holt(0.04, 1e12), generic(), kGrid);
  std::mt19937_64 rng(9);
  const auto x = random_point(kGrid, rng, true);
  const auto w = random_point(kGrid, rng, false);
  const double h = 1e-3;
  const double f1 = op.fd_directional(x, w, h).x2;
  const double f2 = op.fd_directional(x, w, 0.5 * h).x2;
  EXPECT_NEAR(2 * f2 - f1, op.eval_dq(x, w).x2, 1e-8);
}

TEST(FdDirectional, ZeroStepRejected) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(10);
  const auto x = random_point(kGrid, rng, true);
  EXPECT_THROW(op.fd_directional(x, x, 0.0), DomainError);
}

TEST(EvalDq, ContinuousInBasePoint) {
  const auto op = make_op(generic());
  std::mt19937_64 rng(11);
  const auto x = random_point(kGrid, rng, true);
  const auto v = random_point(kGrid, rng, false);
  const auto w = random_point(kGrid, rng, false);
  double prev = INFINITY;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto diff = axpy(op.eval_dq(axpy(x, eps, v), w), -1.0, op.eval_dq(x, w));
    const double n = x_norm(diff, kGrid);
    EXPECT_LT(n, prev);
    EXPECT_LT(n, 10.0 * eps * x_norm(w, kGrid));
    prev = n;
  }
}
