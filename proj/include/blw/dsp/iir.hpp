#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "blw/dsp/padding.hpp"
#include "blw/error.hpp"

namespace blw::dsp {

/// One second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  std::complex<double> response(std::complex<double> z) const {
    const auto zi = 1.0 / z;
    return (b0 + b1 * zi + b2 * zi * zi) / (1.0 + a1 * zi + a2 * zi * zi);
  }
  bool stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }
  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

enum class FilterBand { LowPass, HighPass };

/// Cascade of second-order sections.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {
    for (const auto& s : sections_)
      if (!s.stable() || !std::isfinite(s.a1) || !std::isfinite(s.a2) || !std::isfinite(s.b0))
        throw StabilityError("IIR section has poles on or outside the unit circle");
  }

  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  std::complex<double> response(double f, double fs) const {
    const auto z = std::polar(1.0, 2.0 * std::numbers::pi * f / fs);
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : sections_) h *= s.response(z);
    return h;
  }

  /// Largest pole radius over all sections.
  double max_pole_radius() const {
    double r = 0.0;
    for (const auto& s : sections_) {
      const double disc = s.a1 * s.a1 - 4.0 * s.a2;
      if (disc < 0.0) {
        r = std::max(r, std::sqrt(s.a2));
      } else {
        const double sq = std::sqrt(disc);
        r = std::max({r, std::abs(0.5 * (-s.a1 + sq)), std::abs(0.5 * (-s.a1 - sq))});
      }
    }
    return r;
  }

  /// Samples for the slowest mode to decay by 1e-6.
  std::size_t settling_length() const {
    const double r = max_pole_radius();
    if (r <= 0.0) return 1;
    return static_cast<std::size_t>(std::ceil(std::log(1e-6) / std::log(r)));
  }

  /// Direct-form II transposed filtering. With `steady_start`, section states
  /// begin at the steady state for a constant input equal to x[0].
  std::vector<double> apply(std::span<const double> x, bool steady_start = false) const {
    std::vector<double> y(x.begin(), x.end());
    if (y.empty()) return y;
    double level = y.front();
    for (const auto& s : sections_) {
      double z1 = 0.0, z2 = 0.0;
      if (steady_start) {
        const double g = s.dc_gain();
        z2 = (s.b2 - s.a2 * g) * level;
        z1 = (s.b1 - s.a1 * g) * level + z2;
        level *= g;
      }
      for (double& v : y) {
        const double in = v;
        const double out = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * out + z2;
        z2 = s.b2 * in - s.a2 * out;
        v = out;
      }
    }
    return y;
  }

  /// Forward-backward (zero-phase) filtering with odd-reflection padding of
  /// three settling lengths at each end.
  std::vector<double> filtfilt(std::span<const double> x) const {
    const std::size_t pad = 3 * settling_length();
    auto ext = reflect_pad(x, pad, pad);
    auto fwd = apply(ext, true);
    std::reverse(fwd.begin(), fwd.end());
    auto bwd = apply(fwd, true);
    std::reverse(bwd.begin(), bwd.end());
    return {bwd.begin() + static_cast<std::ptrdiff_t>(pad), bwd.begin() + static_cast<std::ptrdiff_t>(pad + x.size())};
  }

 private:
  std::vector<Biquad> sections_;
};

/// Digital Butterworth low/high-pass via the bilinear transform with cutoff
/// prewarping. Each section is normalized to unit gain in its passband
/// (DC for low-pass, Nyquist for high-pass).
inline SosFilter butterworth(int order, double cutoff, double fs, FilterBand band) {
  if (order < 1) throw ParameterError("Butterworth order must be >= 1");
  if (!(cutoff > 0.0) || !(cutoff < 0.5 * fs)) throw ParameterError("Butterworth cutoff must lie in (0, fs/2)");
  using cd = std::complex<double>;
  const double k = 2.0 * fs;
  const double wc = k * std::tan(std::numbers::pi * cutoff / fs);
  const double zero = band == FilterBand::LowPass ? -1.0 : 1.0;  // digital zero location
  const cd ref = band == FilterBand::LowPass ? cd{1.0, 0.0} : cd{-1.0, 0.0};

  auto digital_pole = [&](int i) {
    const cd proto = std::polar(1.0, std::numbers::pi * (2.0 * i + order + 1.0) / (2.0 * order));
    const cd s = band == FilterBand::LowPass ? wc * proto : wc / proto;
    return (k + s) / (k - s);
  };

  std::vector<Biquad> sections;
  for (int i = 0; i < order / 2; ++i) {
    const cd p = digital_pole(i);
    Biquad q;
    q.b0 = 1.0;
    q.b1 = -2.0 * zero;
    q.b2 = 1.0;
    q.a1 = -2.0 * p.real();
    q.a2 = std::norm(p);
    const double g = std::abs(q.response(ref));
    q.b0 /= g;
    q.b1 /= g;
    q.b2 /= g;
    sections.push_back(q);
  }
  if (order % 2 == 1) {
    const cd p = digital_pole(order / 2);  // the real pole
    Biquad q;
    q.b0 = 1.0;
    q.b1 = -zero;
    q.a1 = -p.real();
    const double g = std::abs(q.response(ref));
    q.b0 /= g;
    q.b1 /= g;
    sections.push_back(q);
  }
  return SosFilter(std::move(sections));
}

}  // namespace blw::dsp
