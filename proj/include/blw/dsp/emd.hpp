#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "blw/dsp/cubic_spline.hpp"
#include "blw/error.hpp"
#include "blw/signal.hpp"

namespace blw::dsp {

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
  std::size_t count() const { return maxima.size() + minima.size(); }
};

/// Interior local extrema. Plateaus count once, at their midpoint.
inline Extrema find_extrema(std::span<const double> x) {
  Extrema e;
  const std::size_t n = x.size();
  if (n < 3) return e;
  int prev_sign = 0;
  std::size_t reached = 0;  // sample reached by the last non-zero step
  for (std::size_t i = 1; i < n; ++i) {
    const double d = x[i] - x[i - 1];
    const int sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      const std::size_t pos = (reached + (i - 1)) / 2;
      (prev_sign > 0 ? e.maxima : e.minima).push_back(pos);
    }
    reached = i;
    prev_sign = sign;
  }
  return e;
}

inline std::size_t count_zero_crossings(std::span<const double> x) {
  std::size_t count = 0;
  int prev = 0;
  for (double v : x) {
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

/// Intrinsic mode functions plus residual of an empirical mode decomposition.
struct ImfSet {
  std::vector<Signal> imfs;
  Signal residual;
};

namespace detail {

// Envelope through the given extrema with two extrema mirrored about each end.
inline std::vector<double> envelope(std::span<const double> x, const std::vector<std::size_t>& idx) {
  const std::size_t n = x.size();
  const double last = static_cast<double>(n - 1);
  std::vector<std::pair<double, double>> knots;
  const std::size_t mirror = std::min<std::size_t>(2, idx.size());
  for (std::size_t k = mirror; k-- > 0;) knots.emplace_back(-static_cast<double>(idx[k]), x[idx[k]]);
  for (std::size_t i : idx) knots.emplace_back(static_cast<double>(i), x[i]);
  for (std::size_t k = 0; k < mirror; ++k) {
    const std::size_t i = idx[idx.size() - 1 - k];
    knots.emplace_back(2.0 * last - static_cast<double>(i), x[i]);
  }
  std::vector<double> kx, ky;
  for (const auto& [px, py] : knots) {
    if (!kx.empty() && px <= kx.back()) continue;  // an extremum exactly at an end would duplicate
    kx.push_back(px);
    ky.push_back(py);
  }
  if (kx.size() < 2) return std::vector<double>(n, ky.empty() ? 0.0 : ky.front());
  const NaturalCubicSpline spline(std::move(kx), std::move(ky));
  return spline.sample_grid(n, false);
}

inline bool is_imf(std::span<const double> h) {
  const auto e = find_extrema(h);
  const auto zc = count_zero_crossings(h);
  const auto ex = e.count();
  return (ex > zc ? ex - zc : zc - ex) <= 1;
}

}  // namespace detail

/// Empirical mode decomposition by cubic-spline envelope sifting.
///
/// Sifting of one IMF stops once the normalized squared change between
/// successive iterates is below `sift_tol` and the candidate satisfies the
/// extrema/zero-crossing condition, or after `max_sifts` iterations. The
/// decomposition stops when the residual has fewer than three extrema or
/// `max_imfs` IMFs have been extracted. The residual is computed as input
/// minus the IMF sum, so completeness holds to rounding.
inline ImfSet emd_sift(const Signal& s, std::size_t max_imfs, double sift_tol, std::size_t max_sifts = 200) {
  if (!(sift_tol > 0.0)) throw ParameterError("EMD sift tolerance must be positive");
  const auto x = s.samples();
  const auto initial = find_extrema(x);
  if (initial.count() == 0) return {{}, s};  // monotonic input: nothing to sift
  if (initial.count() < 4) throw DecompositionError("EMD needs at least four extrema");

  std::vector<double> residual(x.begin(), x.end());
  std::vector<Signal> imfs;
  while (imfs.size() < max_imfs) {
    const auto ext = find_extrema(residual);
    if (ext.count() < 3 || ext.maxima.empty() || ext.minima.empty()) break;

    std::vector<double> h = residual;
    for (std::size_t it = 0; it < max_sifts; ++it) {
      const auto e = find_extrema(h);
      if (e.maxima.empty() || e.minima.empty()) break;
      const auto upper = detail::envelope(h, e.maxima);
      const auto lower = detail::envelope(h, e.minima);
      double num = 0.0, den = 0.0;
      for (std::size_t m = 0; m < h.size(); ++m) {
        const double mean = 0.5 * (upper[m] + lower[m]);
        num += mean * mean;
        den += h[m] * h[m];
        h[m] -= mean;
      }
      const double sd = den > 0.0 ? num / den : 0.0;
      if (sd < sift_tol && detail::is_imf(h)) break;
    }
    for (std::size_t m = 0; m < h.size(); ++m) residual[m] -= h[m];
    imfs.push_back(s.with_samples(std::move(h)));
  }
  // Recompute the residual from the input so that sum(imfs) + residual == input.
  std::vector<double> res(x.begin(), x.end());
  for (const auto& imf : imfs)
    for (std::size_t m = 0; m < res.size(); ++m) res[m] -= imf[m];
  return {std::move(imfs), s.with_samples(std::move(res))};
}

/// Dominant frequency (Hz) from the zero-crossing rate.
inline double zero_crossing_frequency(const Signal& s) {
  return static_cast<double>(count_zero_crossings(s.samples())) / (2.0 * s.duration_seconds());
}

}  // namespace blw::dsp
