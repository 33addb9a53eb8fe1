#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blw/dsp/padding.hpp"
#include "blw/error.hpp"

namespace blw::dsp {

/// Orthogonal wavelet described by its reconstruction low-pass filter.
struct Wavelet {
  std::string name;
  std::vector<double> rec_lo;

  std::size_t length() const { return rec_lo.size(); }
  /// Quadrature-mirror high-pass: g[k] = (-1)^k h[L-1-k].
  std::vector<double> rec_hi() const {
    const std::size_t n = rec_lo.size();
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * rec_lo[n - 1 - k];
    return g;
  }
};

inline std::vector<std::string> supported_wavelets() { return {"sym10", "db4", "db5", "db6"}; }

inline Wavelet wavelet_by_name(const std::string& name) {
  if (name == "sym10" || name == "symlet-10")
    return {"sym10",
            {-0.0004593294210046588,  5.7036083618494284e-05, 0.004593173585311828,  -0.0008043589320165449,
             -0.02035493981231129,    0.005764912033581909,   0.04999497207737669,   -0.0319900568824278,
             -0.03553674047381755,    0.38382676106708546,    0.7695100370211071,    0.47169066693843925,
             -0.07088053578324385,    -0.15949427888491757,   0.011609893903711381,  0.0459272392310922,
             -0.0014653825813050513,  -0.008641299277022422,  9.563267072289475e-05, 0.0007701598091144901}};
  if (name == "db4" || name == "daubechies-4")
    return {"db4",
            {0.2303778133088965, 0.7148465705529157, 0.6308807679298589, -0.027983769416859854,
             -0.18703481171909309, 0.030841381835560764, 0.0328830116668852, -0.010597401785069032}};
  if (name == "db5" || name == "daubechies-5")
    return {"db5",
            {0.16010239797419293, 0.6038292697971896, 0.7243085284377729, 0.13842814590132074,
             -0.24229488706638203, -0.032244869584638375, 0.07757149384004572, -0.006241490212798274,
             -0.012580751999081999, 0.0033357252854737712}};
  if (name == "db6" || name == "daubechies-6")
    return {"db6",
            {0.11154074335010947, 0.49462389039845306, 0.7511339080210954, 0.31525035170919763,
             -0.22626469396543983, -0.12976686756726194, 0.09750160558732304, 0.027522865530305727,
             -0.03158203931748603, 0.0005538422011614961, 0.004777257510945511, -0.0010773010853084796}};
  throw ParameterError("unsupported wavelet '" + name + "' (supported: sym10, db4, db5, db6)");
}

/// Multilevel DWT of a symmetrically extended signal.
///
/// The input is extended (half-sample symmetric) by the support of the
/// coarsest basis function on each side, then rounded up to a multiple of
/// 2^level, and transformed with the periodized orthogonal DWT. The original
/// samples therefore only ever see symmetric boundary data.
struct WaveletDecomposition {
  std::string wavelet_name;
  std::size_t level = 0;
  std::size_t original_length = 0;
  std::size_t pad_left = 0;
  std::vector<double> approximation;         // level L
  std::vector<std::vector<double>> details;  // details[0] is level 1 (finest)
};

/// Largest usable level for a signal length and filter length.
inline std::size_t max_wavelet_level(std::size_t n, std::size_t filter_length) {
  if (filter_length < 2 || n < filter_length - 1) return 0;
  return static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n) / static_cast<double>(filter_length - 1))));
}

namespace detail {

inline void analysis_step(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
                          std::vector<double>& a, std::vector<double>& d) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  a.assign(half, 0.0);
  d.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    double sa = 0.0, sd = 0.0;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      const double v = x[(2 * k + j) % n];
      sa += lo[j] * v;
      sd += hi[j] * v;
    }
    a[k] = sa;
    d[k] = sd;
  }
}

inline std::vector<double> synthesis_step(std::span<const double> a, std::span<const double> d,
                                          std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = 2 * a.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t j = 0; j < lo.size(); ++j) x[(2 * k + j) % n] += lo[j] * a[k] + hi[j] * d[k];
  return x;
}

}  // namespace detail

inline WaveletDecomposition wavedec(std::span<const double> x, const Wavelet& w, std::size_t level) {
  if (level < 1) throw LevelError("wavelet level must be >= 1");
  const std::size_t n = x.size();
  const std::size_t max_level = max_wavelet_level(n, w.length());
  if (level > max_level)
    throw LevelError("wavelet level " + std::to_string(level) + " infeasible for " + std::to_string(n) +
                     " samples (max " + std::to_string(max_level) + ")");

  const std::size_t block = std::size_t{1} << level;
  const std::size_t support = (w.length() - 1) * block;
  const std::size_t pad_left = support;
  std::size_t total = n + 2 * support;
  total = (total + block - 1) / block * block;

  std::vector<double> cur(total);
  for (std::size_t i = 0; i < total; ++i)
    cur[i] = x[symmetric_index(static_cast<long long>(i) - static_cast<long long>(pad_left), n)];

  WaveletDecomposition dec;
  dec.wavelet_name = w.name;
  dec.level = level;
  dec.original_length = n;
  dec.pad_left = pad_left;
  const auto lo = w.rec_lo;
  const auto hi = w.rec_hi();
  for (std::size_t l = 0; l < level; ++l) {
    std::vector<double> a, d;
    detail::analysis_step(cur, lo, hi, a, d);
    dec.details.push_back(std::move(d));
    cur = std::move(a);
  }
  dec.approximation = std::move(cur);
  return dec;
}

/// Inverse of wavedec, trimmed back to the original length.
inline std::vector<double> waverec(const WaveletDecomposition& dec) {
  const auto w = wavelet_by_name(dec.wavelet_name);
  const auto lo = w.rec_lo;
  const auto hi = w.rec_hi();
  std::vector<double> cur = dec.approximation;
  for (std::size_t l = dec.level; l-- > 0;) cur = detail::synthesis_step(cur, dec.details[l], lo, hi);
  return {cur.begin() + static_cast<std::ptrdiff_t>(dec.pad_left),
          cur.begin() + static_cast<std::ptrdiff_t>(dec.pad_left + dec.original_length)};
}

/// Semi-soft (firm) shrinkage: zero below t1, identity above t2, linear in between.
inline double semi_soft_threshold(double x, double t1, double t2) {
  if (!(t1 >= 0.0) || !(t2 >= t1)) throw ParameterError("semi-soft threshold needs 0 <= t1 <= t2");
  const double ax = std::abs(x);
  if (ax <= t1) return 0.0;
  if (ax > t2) return x;
  return std::copysign(t2 * (ax - t1) / (t2 - t1), x);
}

}  // namespace blw::dsp
