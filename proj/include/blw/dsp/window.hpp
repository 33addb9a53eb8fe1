#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace blw::dsp {

/// Kaiser beta for a requested stopband attenuation in dB (Kaiser's empirical fit).
inline double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db > 21.0)
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
  return 0.0;
}

/// Estimated tap count for a Kaiser design with transition width given as a
/// fraction of the sampling rate. Always odd.
inline std::size_t kaiser_length(double attenuation_db, double transition_fraction) {
  const double dw = 2.0 * std::numbers::pi * transition_fraction;
  auto n = static_cast<std::size_t>(std::ceil((attenuation_db - 7.95) / (2.285 * dw))) + 1;
  if (n % 2 == 0) ++n;
  return n;
}

inline std::vector<double> kaiser_window(std::size_t n, double beta) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double denom = std::cyl_bessel_i(0.0, beta);
  const double half = 0.5 * static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = (static_cast<double>(k) - half) / half;
    w[k] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace blw::dsp
