#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace battmpc {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Preserves monotonicity of the knot data; C1 everywhere, piecewise C2.
class Pchip {
public:
  Pchip() = default;

  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("pchip: need >= 2 knots, equal sizes");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("pchip: knots must be strictly increasing");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
      d_[0] = d_[1] = delta[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
          d_[i] = 0.0;
        } else {
          // weighted harmonic mean keeps |d| small enough for monotonicity
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
      }
      d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
      d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  double operator()(double x) const {
    auto [i, t, h] = locate(x);
    const double t2 = t * t, t3 = t2 * t;
    return y_[i] * (2 * t3 - 3 * t2 + 1) + h * d_[i] * (t3 - 2 * t2 + t) +
           y_[i + 1] * (-2 * t3 + 3 * t2) + h * d_[i + 1] * (t3 - t2);
  }

  double deriv(double x) const {
    auto [i, t, h] = locate(x);
    const double t2 = t * t;
    return (y_[i] * (6 * t2 - 6 * t) + h * d_[i] * (3 * t2 - 4 * t + 1) +
            y_[i + 1] * (-6 * t2 + 6 * t) + h * d_[i + 1] * (3 * t2 - 2 * t)) /
           h;
  }

  /// Piecewise second derivative; discontinuous at knots (left limit used there).
  double deriv2(double x) const {
    auto [i, t, h] = locate(x);
    return (y_[i] * (12 * t - 6) + h * d_[i] * (6 * t - 4) + y_[i + 1] * (-12 * t + 6) +
            h * d_[i + 1] * (6 * t - 2)) /
           (h * h);
  }

private:
  static double edge_slope(double h0, double h1, double del0, double del1) {
    // one-sided three-point estimate, clipped for monotonicity
    double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0)
      d = 0.0;
    else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
      d = 3.0 * del0;
    return d;
  }

  struct Seg {
    std::size_t i;
    double t, h;
  };

  Seg locate(double x) const {
    // clamp outside the table: constant extrapolation of the end segment value
    if (x <= x_.front()) x = x_.front();
    if (x >= x_.back()) x = x_.back();
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    return {lo, (x - x_[lo]) / h, h};
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace battmpc
