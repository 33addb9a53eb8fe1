#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "blw/error.hpp"
#include "blw/signal.hpp"

namespace blw {

// Argument order everywhere: s1 is the reference (clean) signal, s2 the
// signal under test (method output).

/// max |s2(m) - s1(m)|
inline double mad(const Signal& s1, const Signal& s2) {
  detail::require_compatible(s1, s2);
  double best = 0.0;
  for (std::size_t m = 0; m < s1.size(); ++m) best = std::max(best, std::abs(s2[m] - s1[m]));
  return best;
}

/// sum (s2(m) - s1(m))^2
inline double ssd(const Signal& s1, const Signal& s2) {
  detail::require_compatible(s1, s2);
  double acc = 0.0;
  for (std::size_t m = 0; m < s1.size(); ++m) {
    const double d = s2[m] - s1[m];
    acc += d * d;
  }
  return acc;
}

/// 100 * sqrt( sum (s2 - s1)^2 / sum (s2 - mean(s1))^2 )
///
/// The denominator is taken literally as printed: processed samples centred
/// on the reference mean. Not symmetric in its arguments.
inline double prd(const Signal& s1, const Signal& s2) {
  detail::require_compatible(s1, s2);
  double mean1 = 0.0;
  for (double v : s1.samples()) mean1 += v;
  mean1 /= static_cast<double>(s1.size());
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < s1.size(); ++m) {
    const double d = s2[m] - s1[m];
    const double c = s2[m] - mean1;
    num += d * d;
    den += c * c;
  }
  if (!(den > 0.0)) throw UndefinedMetricError("PRD undefined: processed signal equals the reference mean everywhere");
  return 100.0 * std::sqrt(num / den);
}

struct MetricTriple {
  double mad = 0.0;
  double ssd = 0.0;
  double prd = 0.0;

  friend bool operator==(const MetricTriple&, const MetricTriple&) = default;
};

inline MetricTriple evaluate(const Signal& reference, const Signal& processed) {
  return {mad(reference, processed), ssd(reference, processed), prd(reference, processed)};
}

/// Sample covariance of s1 and s2 over a centred window of window_s seconds,
/// one value per sample. Windows near the ends are shifted inside the record.
inline Signal sliding_covariance(const Signal& s1, const Signal& s2, double window_s = 1.0) {
  detail::require_compatible(s1, s2);
  const auto w = static_cast<std::size_t>(std::llround(window_s * s1.fs()));
  if (w < 3) throw WindowError("covariance window must span at least 3 samples");
  if (w > s1.size()) throw WindowError("covariance window longer than the signal");
  const std::size_t n = s1.size();
  std::vector<double> c1(n + 1, 0.0), c2(n + 1, 0.0), c12(n + 1, 0.0);
  // Shift by the first samples to limit cancellation in the running sums.
  const double o1 = s1[0], o2 = s2[0];
  for (std::size_t m = 0; m < n; ++m) {
    const double a = s1[m] - o1, b = s2[m] - o2;
    c1[m + 1] = c1[m] + a;
    c2[m + 1] = c2[m] + b;
    c12[m + 1] = c12[m] + a * b;
  }
  const double wd = static_cast<double>(w);
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t start = m >= w / 2 ? m - w / 2 : 0;
    start = std::min(start, n - w);
    const double sa = c1[start + w] - c1[start];
    const double sb = c2[start + w] - c2[start];
    const double sab = c12[start + w] - c12[start];
    out[m] = (sab - sa * sb / wd) / (wd - 1.0);
  }
  return s1.with_samples(std::move(out)).relabeled("covariance");
}

}  // namespace blw
