#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "blw/error.hpp"

namespace blw::dsp {

/// Natural cubic spline (zero second derivative at both end knots).
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size()) throw DimensionError("spline knot abscissae and values differ in length");
    if (n < 2) throw ParameterError("spline needs at least two knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw ParameterError("spline knots must be strictly increasing");

    m_.assign(n, 0.0);
    if (n == 2) return;
    // Tridiagonal system for interior second derivatives (Thomas algorithm).
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double lower = x_[i + 1] - x_[i];  // h for row i (sub-diagonal)
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> sol(k);
    sol[k - 1] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
    for (std::size_t i = 0; i < k; ++i) m_[i + 1] = sol[i];
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  /// Cubic evaluation; outside the knot range the end polynomials are extended.
  double operator()(double t) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    return eval_segment(i, t);
  }

  /// Values at the integer grid 0..n-1. Outside the knot range the value is
  /// held at the nearest knot when `hold_ends` is set, otherwise extrapolated.
  std::vector<double> sample_grid(std::size_t n, bool hold_ends) const {
    std::vector<double> out(n);
    std::size_t seg = 0;
    for (std::size_t m = 0; m < n; ++m) {
      const double t = static_cast<double>(m);
      if (hold_ends && t <= x_.front()) {
        out[m] = y_.front();
        continue;
      }
      if (hold_ends && t >= x_.back()) {
        out[m] = y_.back();
        continue;
      }
      while (seg + 2 < x_.size() && t >= x_[seg + 1]) ++seg;
      out[m] = eval_segment(seg, t);
    }
    return out;
  }

 private:
  double eval_segment(std::size_t i, double t) const {
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace blw::dsp
