#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blw/error.hpp"
#include "blw/signal.hpp"

namespace blw {

/// One Gaussian event of the dynamical ECG model: angular position (rad),
/// amplitude and angular width.
struct WaveEvent {
  std::string name;
  double theta = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const WaveEvent&, const WaveEvent&) = default;
};

/// P, Q, R, S, T in that order.
using Morphology = std::array<WaveEvent, 5>;

/// Parses the morphology defaults file: '#' comments, then one line per
/// event "NAME theta a b" for P, Q, R, S and T.
inline Morphology parse_morphology(const std::string& text) {
  static const std::array<const char*, 5> kOrder{"P", "Q", "R", "S", "T"};
  Morphology m;
  std::array<bool, 5> seen{};
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    WaveEvent ev{name};
    if (!(fields >> ev.theta >> ev.a >> ev.b)) throw ParseError("expected 'NAME theta a b'", line_no);
    std::string extra;
    if (fields >> extra) throw ParseError("trailing text after event parameters", line_no);
    std::size_t slot = kOrder.size();
    for (std::size_t i = 0; i < kOrder.size(); ++i)
      if (name == kOrder[i]) slot = i;
    if (slot == kOrder.size()) throw ParseError("unknown event '" + name + "' (expected P, Q, R, S or T)", line_no);
    if (seen[slot]) throw ParseError("duplicate event '" + name + "'", line_no);
    seen[slot] = true;
    m[slot] = ev;
  }
  for (std::size_t i = 0; i < kOrder.size(); ++i)
    if (!seen[i]) throw ParseError(std::string("missing event ") + kOrder[i]);
  return m;
}

inline Morphology load_morphology(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open morphology file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_morphology(ss.str());
}

/// Standard event table (matches data/morphology_default.txt).
inline Morphology default_morphology() {
  constexpr double pi = std::numbers::pi;
  return {{{"P", -pi / 3.0, 1.2, 0.25},
           {"Q", -pi / 12.0, -5.0, 0.1},
           {"R", 0.0, 30.0, 0.1},
           {"S", pi / 12.0, -7.5, 0.1},
           {"T", pi / 2.0, 0.75, 0.4}}};
}

struct EcgSynthSpec {
  double hr = 120.0;      // beats per minute
  double fs = 360.0;      // Hz
  double duration = 300.0;  // seconds
  Morphology morphology = default_morphology();
  double rr_jitter = 0.0;  // fractional std of RR intervals
  std::uint64_t seed = 42;

  friend bool operator==(const EcgSynthSpec&, const EcgSynthSpec&) = default;
};

struct SyntheticEcg {
  Signal ecg;
  std::vector<std::size_t> r_events;  // sample index of each R event
};

/// Synthetic ECG from the three-dimensional dynamical model of McSharry et al.
///
/// The trajectory is integrated on its limit cycle, where the phase advances
/// at 2*pi/RR and z obeys dz/dt = -sum a_i dtheta_i exp(-dtheta_i^2 / 2 b_i^2) - z.
/// Event angles and widths are rescaled with heart rate as in ECGSYN, a 10 s
/// warm-up removes the start transient, and z is mapped to [-0.4, 1.2].
inline SyntheticEcg synth_ecg_with_events(const EcgSynthSpec& spec) {
  if (!(spec.hr > 0.0)) throw ParameterError("heart rate must be positive");
  if (!(spec.fs > 0.0)) throw RateError("sampling rate must be positive");
  if (!(spec.duration > 0.0)) throw LengthError("duration must be positive");
  if (!(spec.rr_jitter >= 0.0)) throw ParameterError("rr_jitter must be non-negative");
  for (const auto& ev : spec.morphology)
    if (ev.b == 0.0) throw ParameterError("morphology event '" + ev.name + "' has zero width");
  const auto n = detail::rounded_count(spec.duration, spec.fs);
  if (n == 0) throw LengthError("duration rounds to zero samples");

  const double hrfact = std::sqrt(spec.hr / 60.0);
  const double hrfact2 = std::sqrt(hrfact);
  const std::array<double, 5> theta_scale{hrfact2, hrfact, 1.0, hrfact, hrfact2};
  std::array<double, 5> theta{}, amp{}, width{};
  for (std::size_t i = 0; i < 5; ++i) {
    theta[i] = spec.morphology[i].theta * theta_scale[i];
    amp[i] = spec.morphology[i].a;
    width[i] = spec.morphology[i].b * hrfact;
  }

  // Beat schedule: warm-up beats at the nominal RR, then (optionally jittered) beats.
  const double rr0 = 60.0 / spec.hr;
  const double warmup = std::ceil(10.0 / rr0) * rr0;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> starts{-warmup};
  std::vector<double> rr;
  const double end_time = static_cast<double>(n) / spec.fs + rr0;
  while (starts.back() < end_time) {
    double len = rr0;
    if (starts.back() >= 0.0 && spec.rr_jitter > 0.0) len = std::max(0.3 * rr0, rr0 * (1.0 + spec.rr_jitter * normal(rng)));
    rr.push_back(len);
    starts.push_back(starts.back() + len);
  }

  std::size_t beat = 0;
  auto phase_at = [&](double t) {
    while (beat + 1 < rr.size() && t >= starts[beat + 1]) ++beat;
    return -std::numbers::pi + 2.0 * std::numbers::pi * (t - starts[beat]) / rr[beat];
  };
  auto dzdt = [&](double t, double z) {
    const double phi = phase_at(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      const double d = std::remainder(phi - theta[i], 2.0 * std::numbers::pi);
      acc += amp[i] * d * std::exp(-0.5 * d * d / (width[i] * width[i]));
    }
    return -acc - z;
  };

  constexpr int kSubsteps = 8;
  const double dt = 1.0 / (spec.fs * kSubsteps);
  const auto warm_steps = static_cast<long long>(std::llround(warmup * spec.fs * kSubsteps));
  double t = -static_cast<double>(warm_steps) * dt;
  double z = 0.0;
  auto rk4 = [&]() {
    const double k1 = dzdt(t, z);
    const double k2 = dzdt(t + 0.5 * dt, z + 0.5 * dt * k1);
    const double k3 = dzdt(t + 0.5 * dt, z + 0.5 * dt * k2);
    const double k4 = dzdt(t + dt, z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  for (long long s = 0; s < warm_steps; ++s) {
    rk4();
    t += dt;
  }
  t = 0.0;  // remove accumulated rounding before recording
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    t = static_cast<double>(m) / spec.fs;
    out[m] = z;
    for (int s = 0; s < kSubsteps; ++s) {
      rk4();
      t += dt;
    }
  }

  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  const double zmin = *lo;
  const double range = *hi - *lo;
  if (range > 0.0)
    for (double& v : out) v = (v - zmin) * 1.6 / range - 0.4;

  SyntheticEcg result{Signal(std::move(out), spec.fs, "synthetic-ecg"), {}};
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double t_r = starts[i] + 0.5 * rr[i];
    if (t_r < 0.0) continue;
    const auto idx = static_cast<std::size_t>(std::llround(t_r * spec.fs));
    if (idx < n) result.r_events.push_back(idx);
  }
  return result;
}

inline Signal synth_ecg(const EcgSynthSpec& spec) { return synth_ecg_with_events(spec).ecg; }

/// amplitude * sin(2 pi freq m / fs)
inline Signal synth_sine_blw(double freq, double fs, double duration, double amplitude) {
  if (!(fs > 0.0)) throw RateError("sampling rate must be positive");
  if (!(freq > 0.0) || !(freq < 0.5 * fs)) throw ParameterError("sine frequency must lie in (0, fs/2)");
  const auto n = detail::rounded_count(duration, fs);
  if (n == 0) throw LengthError("duration rounds to zero samples");
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m)
    out[m] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(m) / fs);
  return Signal(std::move(out), fs, "sine-blw");
}

struct SineComponent {
  double freq = 0.0;
  double amplitude = 1.0;
  double phase = 0.0;

  friend bool operator==(const SineComponent&, const SineComponent&) = default;
};

/// Sum of sinusoids; used for composite artificial baseline wander.
inline Signal synth_composite_blw(const std::vector<SineComponent>& parts, double fs, double duration) {
  if (parts.empty()) throw ParameterError("composite baseline needs at least one component");
  const auto n = detail::rounded_count(duration, fs);
  if (n == 0) throw LengthError("duration rounds to zero samples");
  std::vector<double> out(n, 0.0);
  for (const auto& p : parts) {
    if (!(p.freq > 0.0) || !(p.freq < 0.5 * fs)) throw ParameterError("sine frequency must lie in (0, fs/2)");
    for (std::size_t m = 0; m < n; ++m)
      out[m] += p.amplitude * std::sin(2.0 * std::numbers::pi * p.freq * static_cast<double>(m) / fs + p.phase);
  }
  return Signal(std::move(out), fs, "composite-blw");
}

enum class NoiseKind { ArtificialSine, RealRecord };

struct ContaminationSpec {
  NoiseKind noise_kind = NoiseKind::ArtificialSine;
  double target_mad = 0.5;
  double sine_freq = 0.6;
};

struct Contamination {
  Signal noisy;
  double scale = 1.0;
};

/// noisy = clean + scale * noise, scale = target_mad / max|noise| over the
/// used span, so the maximum absolute deviation from clean is target_mad.
/// Longer noise is truncated from its start.
inline Contamination contaminate(const Signal& clean, const Signal& noise, const ContaminationSpec& spec) {
  if (!(spec.target_mad > 0.0)) throw ParameterError("target MAD must be positive");
  if (clean.fs() != noise.fs()) throw RateError("clean and noise sampling rates differ; resample the noise first");
  if (noise.size() < clean.size()) throw LengthError("noise record shorter than the clean signal");
  if (spec.noise_kind == NoiseKind::ArtificialSine && !(spec.sine_freq > 0.0 && spec.sine_freq < 0.5 * clean.fs()))
    throw ParameterError("sine frequency must lie in (0, fs/2)");
  double peak = 0.0;
  for (std::size_t m = 0; m < clean.size(); ++m) peak = std::max(peak, std::abs(noise[m]));
  if (peak == 0.0) throw ParameterError("noise is identically zero over the clean span; cannot normalize");
  const double scale = spec.target_mad / peak;
  std::vector<double> out(clean.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = clean[m] + scale * noise[m];
  return {clean.with_samples(std::move(out)).relabeled(clean.label() + "+noise"), scale};
}

}  // namespace blw
