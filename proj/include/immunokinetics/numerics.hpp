#pragma once

#include <functional>
#include <span>
#include <vector>

namespace immunokinetics {

/// Adaptive Simpson quadrature of f over [a, b].
///
/// Refines until the local Richardson estimate drops below
/// max(rel_tol * |I|, abs_tol). Throws QuadratureError if the recursion
/// depth is exhausted before that happens.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-300,
                        int max_depth = 50);

/// Bisection for a root of f on [lo, hi]; f(lo) and f(hi) must not share a sign.
/// Stops when the bracket is narrower than x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol, int max_iter = 400);

/// Piecewise cubic Hermite interpolant on strictly increasing knots.
class PiecewiseCubic {
 public:
  PiecewiseCubic() = default;

  static PiecewiseCubic hermite(std::vector<double> x, std::vector<double> y,
                                std::vector<double> slopes);
  /// Fritsch-Carlson slopes: preserves monotonicity of the data, C1.
  static PiecewiseCubic monotone(std::vector<double> x, std::vector<double> y);
  /// Three-point centered slopes (second-order accurate derivative estimates).
  static PiecewiseCubic smooth(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  double derivative(double t) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::span<const double> slopes() const { return m_; }

  /// Mutable access used to pin an end slope after construction.
  void set_slope(std::size_t i, double slope) { m_.at(i) = slope; }

 private:
  PiecewiseCubic(std::vector<double> x, std::vector<double> y, std::vector<double> m);
  std::size_t segment(double t) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace immunokinetics
