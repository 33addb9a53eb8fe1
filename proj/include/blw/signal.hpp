#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blw/dsp/padding.hpp"
#include "blw/dsp/window.hpp"
#include "blw/error.hpp"

namespace blw {

/// Uniformly sampled, real-valued waveform.
///
/// Always non-empty, finite and with a positive sampling rate. Amplitudes are
/// unit-agnostic; the label only records where the data came from.
class Signal {
 public:
  Signal(std::vector<double> samples, double fs, std::string label = {})
      : samples_(std::move(samples)), fs_(fs), label_(std::move(label)) {
    if (!(fs_ > 0.0) || !std::isfinite(fs_)) throw RateError("sampling rate must be positive and finite");
    if (samples_.empty()) throw LengthError("signal must contain at least one sample");
    for (double v : samples_)
      if (!std::isfinite(v)) throw ParameterError("signal contains a non-finite sample");
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& vector() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double fs() const noexcept { return fs_; }
  const std::string& label() const noexcept { return label_; }
  double duration_seconds() const noexcept { return static_cast<double>(samples_.size()) / fs_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Same rate and label, new samples.
  Signal with_samples(std::vector<double> samples) const { return Signal(std::move(samples), fs_, label_); }
  Signal relabeled(std::string label) const { return Signal(samples_, fs_, std::move(label)); }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> samples_;
  double fs_;
  std::string label_;
};

/// A window into a signal: [start_index, start_index + length) around center_index.
struct SegmentRef {
  std::size_t start_index = 0;
  std::size_t length = 0;
  std::size_t center_index = 0;

  friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

namespace detail {

inline void require_compatible(const Signal& a, const Signal& b) {
  if (a.size() != b.size())
    throw DimensionError("signal lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  if (a.fs() != b.fs())
    throw RateError("sampling rates differ: " + std::to_string(a.fs()) + " Hz vs " + std::to_string(b.fs()) + " Hz");
}

inline std::size_t rounded_count(double seconds, double fs) {
  const double n = seconds * fs;
  if (!(n > 0.0)) return 0;
  return static_cast<std::size_t>(std::llround(n));
}

}  // namespace detail

inline Signal subtract(const Signal& a, const Signal& b) {
  detail::require_compatible(a, b);
  std::vector<double> out(a.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = a[m] - b[m];
  return a.with_samples(std::move(out));
}

inline Signal add(const Signal& a, const Signal& b) {
  detail::require_compatible(a, b);
  std::vector<double> out(a.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = a[m] + b[m];
  return a.with_samples(std::move(out));
}

inline Signal scaled(const Signal& a, double k) {
  std::vector<double> out(a.samples().begin(), a.samples().end());
  for (double& v : out) v *= k;
  return a.with_samples(std::move(out));
}

/// Rational resampling ratio up/down with up/down == target/source.
struct ResampleRatio {
  long long up = 1;
  long long down = 1;
};

inline ResampleRatio resample_ratio(double fs, double target_fs) {
  // Integer rates (the common case) reduce exactly; others are quantized to 1 mHz.
  auto is_int = [](double f) { return std::abs(f - std::round(f)) < 1e-9; };
  const double scale = is_int(fs) && is_int(target_fs) ? 1.0 : 1000.0;
  const long long a = std::llround(fs * scale);
  const long long b = std::llround(target_fs * scale);
  const long long g = std::gcd(a, b);
  return {b / g, a / g};
}

/// Polyphase rational resampling with a Kaiser-windowed sinc anti-alias kernel
/// (40 dB stopband, passband up to 90% of the lower Nyquist rate).
///
/// Each polyphase branch is normalized to unit DC gain and the input is
/// extended by odd reflection, so slow content passes with negligible error
/// right up to the record ends.
inline Signal resample(const Signal& s, double target_fs) {
  if (!(target_fs > 0.0) || !std::isfinite(target_fs)) throw ParameterError("target sampling rate must be positive");
  if (target_fs == s.fs()) return s;

  const auto [up, down] = resample_ratio(s.fs(), target_fs);
  constexpr double kStopbandDb = 40.0;
  const double fs_up = s.fs() * static_cast<double>(up);
  const double nyq_low = 0.5 * std::min(s.fs(), target_fs);
  const double cutoff = 0.9 * nyq_low;
  const double transition = 0.2 * nyq_low;
  const std::size_t taps = dsp::kaiser_length(kStopbandDb, transition / fs_up);
  const auto window = dsp::kaiser_window(taps, dsp::kaiser_beta(kStopbandDb));
  const long long half = static_cast<long long>(taps - 1) / 2;
  std::vector<double> proto(taps);
  for (std::size_t k = 0; k < taps; ++k)
    proto[k] = dsp::sinc(2.0 * cutoff / fs_up * static_cast<double>(static_cast<long long>(k) - half)) * window[k];

  // Branch p (output grid offset p on the upsampled axis) uses input samples
  // i with |p + up*j - up*i| <= half; store them relative to floor division.
  struct Branch {
    long long first = 0;  // offset of first input sample relative to the base index
    std::vector<double> weights;
  };
  std::vector<Branch> branches(static_cast<std::size_t>(up));
  for (long long p = 0; p < up; ++p) {
    Branch br;
    // Inputs i relative to base b = 0: position u = p, need |p - up*i| <= half.
    const long long lo = static_cast<long long>(std::ceil(static_cast<double>(p - half) / static_cast<double>(up)));
    const long long hi = static_cast<long long>(std::floor(static_cast<double>(p + half) / static_cast<double>(up)));
    br.first = lo;
    double sum = 0.0;
    for (long long i = lo; i <= hi; ++i) {
      const double w = proto[static_cast<std::size_t>(p - up * i + half)];
      br.weights.push_back(w);
      sum += w;
    }
    for (double& w : br.weights) w /= sum;
    branches[static_cast<std::size_t>(p)] = std::move(br);
  }

  const std::size_t n = s.size();
  const auto n_out = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(n) * static_cast<double>(up) / static_cast<double>(down))));
  const std::size_t pad = static_cast<std::size_t>(half / up + 2);
  const auto ext = dsp::reflect_pad(s.samples(), pad, pad + static_cast<std::size_t>(down / up) + 2);

  std::vector<double> out(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    const long long u = static_cast<long long>(j) * down;
    const long long base = u / up;
    const auto& br = branches[static_cast<std::size_t>(u % up)];
    double acc = 0.0;
    long long idx = base + br.first + static_cast<long long>(pad);
    for (double w : br.weights) acc += w * ext[static_cast<std::size_t>(idx++)];
    out[j] = acc;
  }
  return Signal(std::move(out), target_fs, s.label());
}

/// Window of `duration` seconds centred on `center`, shifted inward at the
/// record edges so the requested length is kept.
inline SegmentRef extract_window(const Signal& s, std::size_t center, double duration) {
  if (center >= s.size()) throw WindowError("window centre outside the signal");
  const std::size_t length = detail::rounded_count(duration, s.fs());
  if (length == 0) throw WindowError("window duration rounds to zero samples");
  if (length > s.size()) throw WindowError("window longer than the signal");
  const std::size_t half = length / 2;
  std::size_t start = center >= half ? center - half : 0;
  start = std::min(start, s.size() - length);
  return {start, length, center};
}

}  // namespace blw
