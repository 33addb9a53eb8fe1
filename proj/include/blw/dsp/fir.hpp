#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "blw/dsp/padding.hpp"
#include "blw/dsp/window.hpp"
#include "blw/error.hpp"

namespace blw::dsp {

inline constexpr std::size_t kMaxFirTaps = 8191;

/// Linear-phase high-pass by spectral inversion of a Kaiser-windowed sinc
/// low-pass. The low-pass prototype is scaled to exactly unit DC gain, so the
/// high-pass coefficients sum to zero up to rounding.
inline std::vector<double> design_fir_highpass(double cutoff, double fs, double transition, double stopband_db) {
  if (!(cutoff > 0.0) || !(cutoff < 0.5 * fs)) throw DesignError("FIR cutoff must lie in (0, fs/2)");
  if (!(transition > 0.0)) throw DesignError("FIR transition width must be positive");
  if (!(stopband_db > 0.0)) throw DesignError("FIR stopband attenuation must be positive");

  const double dw = 2.0 * std::numbers::pi * transition / fs;
  const double estimate = (stopband_db - 7.95) / (2.285 * dw) + 1.0;
  if (!(estimate < static_cast<double>(kMaxFirTaps)))
    throw DesignError("FIR specification needs more than 8191 taps; widen the transition band");
  const std::size_t taps = kaiser_length(stopband_db, transition / fs);
  if (taps > kMaxFirTaps) throw DesignError("FIR specification needs more than 8191 taps; widen the transition band");

  const auto w = kaiser_window(taps, kaiser_beta(stopband_db));
  const double half = 0.5 * static_cast<double>(taps - 1);
  const double fc = cutoff / fs;
  std::vector<double> h(taps);
  double dc = 0.0;
  for (std::size_t k = 0; k < taps; ++k) {
    h[k] = 2.0 * fc * sinc(2.0 * fc * (static_cast<double>(k) - half)) * w[k];
    dc += h[k];
  }
  for (double& v : h) v = -v / dc;
  h[taps / 2] += 1.0;
  return h;
}

/// H(e^{j 2 pi f / fs}) of an FIR kernel.
inline std::complex<double> fir_response(std::span<const double> h, double f, double fs) {
  const double w = 2.0 * std::numbers::pi * f / fs;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * std::polar(1.0, -w * static_cast<double>(k));
  return acc;
}

/// Convolution with an odd-length kernel, output aligned to the kernel centre
/// (group delay removed). Edges use odd reflection.
inline std::vector<double> convolve_centered(std::span<const double> x, std::span<const double> h) {
  const std::size_t half = h.size() / 2;
  const auto ext = reflect_pad(x, half, half);
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t m = 0; m < x.size(); ++m) {
    // y[m] = sum_k h[k] x[m + half - k]
    const double* xp = ext.data() + m + 2 * half;
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) acc += h[k] * xp[-static_cast<std::ptrdiff_t>(k)];
    y[m] = acc;
  }
  return y;
}

}  // namespace blw::dsp
