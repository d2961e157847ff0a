#include "immunokinetics/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "immunokinetics/errors.hpp"

namespace immunokinetics {

namespace {

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Panels narrower than min_width are accepted as they are: near a jump the
// error shrinks no faster than eps, and such panels carry negligible mass.
double refine(const std::function<double(double)>& f, const SimpsonPanel& p, double eps,
              int depth, double min_width) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (!std::isfinite(delta)) {
    throw QuadratureError("adaptive_simpson: non-finite integrand value");
  }
  if (std::abs(delta) <= 15.0 * eps || p.b - p.a <= min_width) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    std::ostringstream msg;
    msg << "adaptive_simpson: no convergence on [" << p.a << ", " << p.b << "]";
    throw QuadratureError(msg.str());
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * eps, depth - 1, min_width) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * eps, depth - 1, min_width);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, rel_tol, abs_tol, max_depth);

  // A coarse composite pass gives the magnitude used for the relative tolerance
  // and avoids accepting a lucky three-point estimate on oscillating integrands.
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  std::vector<SimpsonPanel> panels;
  panels.reserve(kPanels);
  double estimate = 0.0;
  double scale = 0.0;
  double fa = f(a);
  for (int k = 0; k < kPanels; ++k) {
    const double pa = a + k * h;
    const double pb = (k + 1 == kPanels) ? b : a + (k + 1) * h;
    const double pm = 0.5 * (pa + pb);
    const double fm = f(pm);
    const double fb = f(pb);
    const double s = simpson(pa, pb, fa, fm, fb);
    panels.push_back({pa, pm, pb, fa, fm, fb, s});
    estimate += s;
    scale += std::abs(s);
    fa = fb;
  }
  if (!std::isfinite(estimate)) {
    throw QuadratureError("adaptive_simpson: non-finite integrand value");
  }
  const double eps = std::max(rel_tol * scale, abs_tol);
  double total = 0.0;
  const double min_width = 1e-13 * (b - a);
  for (const auto& p : panels) total += refine(f, p, eps / kPanels, max_depth, min_width);
  return total;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw DomainError("bisect: root is not bracketed");
  }
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PiecewiseCubic::PiecewiseCubic(std::vector<double> x, std::vector<double> y,
                               std::vector<double> m)
    : x_(std::move(x)), y_(std::move(y)), m_(std::move(m)) {
  if (x_.size() < 2 || y_.size() != x_.size() || m_.size() != x_.size()) {
    throw ConfigError("PiecewiseCubic: need at least two knots with matching values");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw ConfigError("PiecewiseCubic: knots must be strictly increasing");
    }
  }
}

PiecewiseCubic PiecewiseCubic::hermite(std::vector<double> x, std::vector<double> y,
                                       std::vector<double> slopes) {
  return PiecewiseCubic(std::move(x), std::move(y), std::move(slopes));
}

PiecewiseCubic PiecewiseCubic::monotone(std::vector<double> x, std::vector<double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw ConfigError("PiecewiseCubic: need at least two knots with matching values");
  }
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);

  std::vector<double> m(n);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      // weighted harmonic mean (Fritsch-Butland form of the FC condition)
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      m[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      m[i] = 0.0;
      m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / secant[i];
    const double b = m[i + 1] / secant[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m[i] = tau * a * secant[i];
      m[i + 1] = tau * b * secant[i];
    }
  }
  return PiecewiseCubic(std::move(x), std::move(y), std::move(m));
}

PiecewiseCubic PiecewiseCubic::smooth(std::vector<double> x, std::vector<double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw ConfigError("PiecewiseCubic: need at least two knots with matching values");
  }
  std::vector<double> m(n);
  if (n == 2) {
    m[0] = m[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return PiecewiseCubic(std::move(x), std::move(y), std::move(m));
  }
  auto three_point = [&](std::size_t i0, double at) {
    // derivative at `at` of the quadratic through knots i0, i0+1, i0+2
    const double x0 = x[i0], x1 = x[i0 + 1], x2 = x[i0 + 2];
    const double l0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return y[i0] * l0 + y[i0 + 1] * l1 + y[i0 + 2] * l2;
  };
  m[0] = three_point(0, x[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = three_point(i - 1, x[i]);
  m[n - 1] = three_point(n - 3, x[n - 1]);
  return PiecewiseCubic(std::move(x), std::move(y), std::move(m));
}

std::size_t PiecewiseCubic::segment(double t) const {
  const double span = x_.back() - x_.front();
  const double slack = 1e-12 * std::max(1.0, span);
  if (t < x_.front() - slack || t > x_.back() + slack) {
    std::ostringstream msg;
    msg << "PiecewiseCubic: t=" << t << " outside [" << x_.front() << ", " << x_.back()
        << "]";
    throw DomainError(msg.str());
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double PiecewiseCubic::operator()(double t) const {
  const std::size_t i = segment(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double PiecewiseCubic::derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s;
  const double d00 = (6 * s2 - 6 * s) / h;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = (-6 * s2 + 6 * s) / h;
  const double d11 = 3 * s2 - 2 * s;
  return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

}  // namespace immunokinetics
