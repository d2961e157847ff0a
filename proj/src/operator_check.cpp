#include "immunokinetics/operator_check.hpp"

#include <cmath>
#include <sstream>

#include "immunokinetics/errors.hpp"

namespace immunokinetics {

double AbstractPoint::hat(const ImmunityGrid& grid) const {
  return x1 + x2 + grid.integrate(x3);
}

double x_norm(const AbstractPoint& x, const ImmunityGrid& grid) {
  double s = std::abs(x.x1) + std::abs(x.x2);
  for (std::size_t i = 0; i < x.x3.size(); ++i) s += std::abs(x.x3[i]) * grid.width(i);
  return s;
}

AbstractPoint axpy(const AbstractPoint& a, double s, const AbstractPoint& b) {
  AbstractPoint out{a.x1 + s * b.x1, a.x2 + s * b.x2, a.x3};
  for (std::size_t i = 0; i < out.x3.size(); ++i) out.x3[i] += s * b.x3.at(i);
  return out;
}

AbstractPoint random_point(const ImmunityGrid& grid, std::mt19937_64& rng, bool positive) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] { return positive ? 0.2 + 0.8 * u(rng) : 2.0 * u(rng) - 1.0; };
  AbstractPoint p{draw(), draw(), std::vector<double>(grid.size())};
  const double len = grid.z_max() - grid.z_min();
  const double base = positive ? 1.0 + u(rng) : 0.0;
  double amp[3], phase[3];
  for (int k = 0; k < 3; ++k) {
    amp[k] = (positive ? 0.3 : 1.0) * (2.0 * u(rng) - 1.0);
    phase[k] = 2.0 * M_PI * u(rng);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = (grid.center(i) - grid.z_min()) / len;
    double v = base;
    for (int k = 0; k < 3; ++k) v += amp[k] * std::cos(M_PI * (k + 1) * s + phase[k]);
    p.x3[i] = v / len;
  }
  return p;
}

AbstractOperator::AbstractOperator(ModelParameters params, BirthFunction birth,
                                   const BoostingKernel& kernel, ImmunityGrid grid)
    : params_(params), birth_(std::move(birth)), grid_(std::move(grid)), transfer_(kernel, grid_) {}

void AbstractOperator::check_point(const AbstractPoint& x) const {
  if (x.x3.size() != grid_.size()) throw DomainError("point does not live on the operator grid");
  const double hat = x.hat(grid_);
  if (!(std::abs(hat) >= 1e-14 * x_norm(x, grid_)) || hat == 0.0) {
    std::ostringstream msg;
    msg << "degenerate point: x1 + x2 + int x3 = " << hat;
    throw DomainError(msg.str());
  }
}

AbstractPoint AbstractOperator::eval_q(const AbstractPoint& x) const {
  check_point(x);
  const double hat = x.hat(grid_);
  const double beta = params_.beta;
  const double incidence = beta * x.x1 * x.x2 / hat;
  AbstractPoint q{birth_(hat) - incidence, incidence, transfer_.apply(x.x3)};
  const double hazard = beta * x.x2 / hat;
  for (std::size_t i = 0; i < q.x3.size(); ++i) q.x3[i] = hazard * (q.x3[i] - x.x3[i]);
  return q;
}

AbstractPoint AbstractOperator::eval_dq(const AbstractPoint& x, const AbstractPoint& w) const {
  check_point(x);
  if (w.x3.size() != grid_.size()) throw DomainError("direction does not live on the operator grid");
  const double beta = params_.beta;
  const double hat = x.hat(grid_);
  const double hat2 = hat * hat;
  const double w_int = grid_.integrate(w.x3);
  const double w_hat = w.x1 + w.x2 + w_int;

  const double P1 = birth_.derivative(hat) * w_hat;
  const double P2 = beta * (x.x2 * (hat - x.x1) / hat2 * w.x1 +
                            x.x1 * (hat - x.x2) / hat2 * w.x2 - x.x1 * x.x2 / hat2 * w_int);

  // d(x2 / hat) in direction w, shared by P3 and P4
  const double ratio_dir = (-x.x2 * w.x1 + (hat - x.x2) * w.x2 - x.x2 * w_int) / hat2;
  const auto Kx3 = transfer_.apply(x.x3);
  const auto Kw3 = transfer_.apply(w.x3);
  AbstractPoint out{P1 - P2, P2, std::vector<double>(grid_.size())};
  for (std::size_t i = 0; i < out.x3.size(); ++i) {
    const double P3 = beta * (ratio_dir * x.x3[i] + x.x2 / hat * w.x3[i]);
    const double P4 = beta * (ratio_dir * Kx3[i] + x.x2 / hat * Kw3[i]);
    out.x3[i] = -P3 + P4;
  }
  return out;
}

AbstractPoint AbstractOperator::fd_directional(const AbstractPoint& x, const AbstractPoint& w,
                                               double h, bool centered) const {
  if (!(h > 0.0)) throw DomainError("finite-difference step h must be > 0");
  const AbstractPoint plus = eval_q(axpy(x, h, w));
  const AbstractPoint base = centered ? eval_q(axpy(x, -h, w)) : eval_q(x);
  const double span = centered ? 2.0 * h : h;
  AbstractPoint out = axpy(plus, -1.0, base);
  out.x1 /= span;
  out.x2 /= span;
  for (double& v : out.x3) v /= span;
  return out;
}

double AbstractOperator::fd_slope(const AbstractPoint& x, const AbstractPoint& w,
                                  std::span<const double> hs, bool centered) const {
  if (hs.size() < 2) throw DomainError("slope fit needs at least two step sizes");
  const AbstractPoint dq = eval_dq(x, w);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double h : hs) {
    const double err = x_norm(axpy(fd_directional(x, w, h, centered), -1.0, dq), grid_);
    if (!(err > 0.0)) throw SimulationError("finite-difference error vanished; slope undefined");
    const double lx = std::log(h);
    const double ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(hs.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace immunokinetics
