#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "blw/dsp/iir.hpp"
#include "blw/error.hpp"
#include "blw/ingest.hpp"
#include "blw/signal.hpp"

namespace blw {

/// Strictly ascending R-peak sample indices.
struct BeatAnnotations {
  std::vector<std::size_t> r_peaks;
  double source_fs = 0.0;

  std::size_t size() const { return r_peaks.size(); }
  bool empty() const { return r_peaks.empty(); }
  friend bool operator==(const BeatAnnotations&, const BeatAnnotations&) = default;
};

inline constexpr double kRefractorySeconds = 0.2;

/// Derivative-square-integrate R-peak detector.
///
/// 5-15 Hz zero-phase band-pass, five-point centred derivative, squaring and
/// a 150 ms centred moving-window integral. Local maxima of the integral
/// above 0.4 x the running mean of the last eight accepted peak heights are
/// accepted, keeping only the larger of two candidates closer than 200 ms.
/// Each accepted peak is moved to the raw-signal maximum within +/-50 ms.
inline BeatAnnotations detect_r_peaks(const Signal& s) {
  const double fs = s.fs();
  if (s.duration_seconds() < 2.0) throw ParameterError("R-peak detection needs at least 2 s of signal");
  if (fs <= 40.0) throw RateError("R-peak detection needs fs > 40 Hz");
  const std::size_t n = s.size();

  const auto hp = dsp::butterworth(2, 5.0, fs, dsp::FilterBand::HighPass);
  const auto lp = dsp::butterworth(2, 15.0, fs, dsp::FilterBand::LowPass);
  const auto band = lp.filtfilt(hp.filtfilt(s.samples()));

  std::vector<double> sq(n, 0.0);
  for (std::size_t m = 2; m + 2 < n; ++m) {
    const double d = (-band[m - 2] - 2.0 * band[m - 1] + 2.0 * band[m + 1] + band[m + 2]) / 8.0;
    sq[m] = d * d;
  }

  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.15 * fs)));
  const std::size_t half = win / 2;
  std::vector<double> csum(n + 1, 0.0);
  for (std::size_t m = 0; m < n; ++m) csum[m + 1] = csum[m] + sq[m];
  std::vector<double> mwi(n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t lo = m >= half ? m - half : 0;
    const std::size_t hi = std::min(n, m + half + 1);
    mwi[m] = (csum[hi] - csum[lo]) / static_cast<double>(win);
  }

  const auto refractory = static_cast<std::size_t>(std::llround(kRefractorySeconds * fs));
  const auto init_span = std::min(n, static_cast<std::size_t>(2.0 * fs));
  const double init_peak = *std::max_element(mwi.begin(), mwi.begin() + static_cast<std::ptrdiff_t>(init_span));
  if (!(init_peak > 0.0)) {
    const double global = *std::max_element(mwi.begin(), mwi.end());
    if (!(global > 0.0)) throw EmptyAnnotationError("no QRS activity found");
  }

  std::deque<double> recent;
  auto running_mean = [&]() {
    if (recent.empty()) return init_peak;
    return std::accumulate(recent.begin(), recent.end(), 0.0) / static_cast<double>(recent.size());
  };
  std::vector<std::size_t> peaks;
  std::vector<double> heights;
  for (std::size_t m = 1; m + 1 < n; ++m) {
    if (!(mwi[m] > mwi[m - 1] && mwi[m] >= mwi[m + 1])) continue;
    if (mwi[m] <= 0.4 * running_mean()) continue;
    if (!peaks.empty() && m - peaks.back() <= refractory) {
      if (mwi[m] > heights.back()) {
        peaks.back() = m;
        heights.back() = mwi[m];
        recent.back() = mwi[m];
      }
      continue;
    }
    peaks.push_back(m);
    heights.push_back(mwi[m]);
    recent.push_back(mwi[m]);
    if (recent.size() > 8) recent.pop_front();
  }

  const auto search = static_cast<std::size_t>(std::llround(0.05 * fs));
  BeatAnnotations ann{{}, fs};
  for (std::size_t p : peaks) {
    const std::size_t lo = p >= search ? p - search : 0;
    const std::size_t hi = std::min(n - 1, p + search);
    std::size_t best = lo;
    for (std::size_t m = lo; m <= hi; ++m)
      if (s[m] > s[best]) best = m;
    if (!ann.r_peaks.empty() && best - ann.r_peaks.back() <= refractory) {
      if (s[best] > s[ann.r_peaks.back()]) ann.r_peaks.back() = best;
      continue;
    }
    if (!ann.r_peaks.empty() && best <= ann.r_peaks.back()) continue;
    ann.r_peaks.push_back(best);
  }
  if (ann.empty()) throw EmptyAnnotationError("no R peaks detected");
  return ann;
}

inline void write_annotations_csv(const BeatAnnotations& ann, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  for (std::size_t r : ann.r_peaks) f << r << '\n';
}

inline BeatAnnotations read_annotations_csv(const std::filesystem::path& path, double fs) {
  const auto sig = read_csv(path, fs);  // reuses the one-value-per-line reader
  BeatAnnotations ann{{}, fs};
  for (double v : sig.samples()) {
    if (v < 0 || v != std::floor(v)) throw ParseError("annotation indices must be non-negative integers");
    const auto idx = static_cast<std::size_t>(v);
    if (!ann.r_peaks.empty() && idx <= ann.r_peaks.back()) throw ParseError("annotations must be strictly increasing");
    ann.r_peaks.push_back(idx);
  }
  return ann;
}

}  // namespace blw
