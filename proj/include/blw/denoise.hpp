#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "blw/dsp/cubic_spline.hpp"
#include "blw/dsp/emd.hpp"
#include "blw/dsp/fir.hpp"
#include "blw/dsp/ica.hpp"
#include "blw/dsp/iir.hpp"
#include "blw/dsp/wavelet.hpp"
#include "blw/error.hpp"
#include "blw/ingest.hpp"
#include "blw/qrs.hpp"
#include "blw/signal.hpp"

namespace blw {

/// Parameters of every baseline-removal method. Zero in an "auto" field
/// means the value is derived from the signal (see each method).
struct MethodConfig {
  double cutoff_hz = 0.67;
  double fir_transition_hz = 0.5;
  double fir_stopband_db = 40.0;
  int iir_order = 4;
  double spline_pr_offset_s = 0.066;
  double spline_knot_window_s = 0.020;
  double lms_mu1 = 0.002;
  double lms_mu2 = 0.01;
  double lms_beat_window_s = 0.0;  // auto: 0.8 x shortest RR
  bool lms_smooth_joins = false;
  double maf_window_s = 0.0;  // auto: fs / cutoff_hz samples
  std::size_t ica_channels = 60;
  std::size_t ica_delay_samples = 15;
  std::uint64_t ica_seed = 42;
  std::size_t ica_max_iter = 200;
  double ica_tol = 1e-4;
  double ica_kurtosis_sigma = 3.0;
  double issm_threshold = 1e-3;
  std::size_t issm_max_iter = 100;
  std::size_t emd_max_imfs = 12;
  double emd_sift_tol = 0.05;
  double emd_blw_freq_hz = 1.0;
  std::string wavelet_name = "sym10";
  std::size_t wavelet_level = 0;  // auto: floor(log2(fs / (2 cutoff)))
  double threshold_t1 = 0.0;
  double threshold_t2 = 0.0;

  friend bool operator==(const MethodConfig&, const MethodConfig&) = default;
};

// ---------------------------------------------------------------------------
// Flat key/value serialization

namespace detail {

struct ConfigField {
  std::string_view key;
  std::function<std::string(const MethodConfig&)> get;
  std::function<void(MethodConfig&, std::string_view)> set;
};

template <typename T>
ConfigField field(std::string_view key, T MethodConfig::*member) {
  ConfigField f{key, {}, {}};
  f.get = [member](const MethodConfig& c) {
    if constexpr (std::is_same_v<T, std::string>) {
      return c.*member;
    } else if constexpr (std::is_same_v<T, bool>) {
      return std::string(c.*member ? "true" : "false");
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_sample(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  f.set = [member, key](MethodConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, std::string>) {
      c.*member = std::string(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (v == "true" || v == "1") c.*member = true;
      else if (v == "false" || v == "0") c.*member = false;
      else throw ParseError("'" + std::string(key) + "' expects true/false, got '" + std::string(v) + "'");
    } else {
      T parsed{};
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
      if (ec != std::errc{} || p != v.data() + v.size())
        throw ParseError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
      c.*member = parsed;
    }
  };
  return f;
}

inline const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      field("cutoff_hz", &MethodConfig::cutoff_hz),
      field("fir_transition_hz", &MethodConfig::fir_transition_hz),
      field("fir_stopband_db", &MethodConfig::fir_stopband_db),
      field("iir_order", &MethodConfig::iir_order),
      field("spline_pr_offset_s", &MethodConfig::spline_pr_offset_s),
      field("spline_knot_window_s", &MethodConfig::spline_knot_window_s),
      field("lms_mu1", &MethodConfig::lms_mu1),
      field("lms_mu2", &MethodConfig::lms_mu2),
      field("lms_beat_window_s", &MethodConfig::lms_beat_window_s),
      field("lms_smooth_joins", &MethodConfig::lms_smooth_joins),
      field("maf_window_s", &MethodConfig::maf_window_s),
      field("ica_channels", &MethodConfig::ica_channels),
      field("ica_delay_samples", &MethodConfig::ica_delay_samples),
      field("ica_seed", &MethodConfig::ica_seed),
      field("ica_max_iter", &MethodConfig::ica_max_iter),
      field("ica_tol", &MethodConfig::ica_tol),
      field("ica_kurtosis_sigma", &MethodConfig::ica_kurtosis_sigma),
      field("issm_threshold", &MethodConfig::issm_threshold),
      field("issm_max_iter", &MethodConfig::issm_max_iter),
      field("emd_max_imfs", &MethodConfig::emd_max_imfs),
      field("emd_sift_tol", &MethodConfig::emd_sift_tol),
      field("emd_blw_freq_hz", &MethodConfig::emd_blw_freq_hz),
      field("wavelet_name", &MethodConfig::wavelet_name),
      field("wavelet_level", &MethodConfig::wavelet_level),
      field("threshold_t1", &MethodConfig::threshold_t1),
      field("threshold_t2", &MethodConfig::threshold_t2),
  };
  return fields;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : detail::config_fields()) keys.emplace_back(f.key);
  return keys;
}

/// Sets one field from its text form; unknown keys are rejected.
inline void set_config_value(MethodConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : detail::config_fields()) {
    if (f.key == key) {
      f.set(cfg, detail::trim(value));
      return;
    }
  }
  throw ParseError("unknown method parameter '" + std::string(key) + "'");
}

inline std::string get_config_value(const MethodConfig& cfg, std::string_view key) {
  for (const auto& f : detail::config_fields())
    if (f.key == key) return f.get(cfg);
  throw ParseError("unknown method parameter '" + std::string(key) + "'");
}

inline std::map<std::string, std::string> config_to_map(const MethodConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& f : detail::config_fields()) out.emplace(std::string(f.key), f.get(cfg));
  return out;
}

/// "key = value" per line, in declaration order.
inline std::string serialize_config(const MethodConfig& cfg) {
  std::string out;
  for (const auto& f : detail::config_fields()) out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

/// Reads "key = value" lines ('#' comments, blank lines ignored) on top of `base`.
inline MethodConfig parse_config(const std::string& text, MethodConfig base = {}) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    try {
      set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// Method registry

enum class Method { Splines, Fir, Iir, Lms, Maf, Ica, Issm, Emd, Wavelet, Identity };

struct MethodInfo {
  Method id;
  std::string_view key;    // CLI / spec name
  std::string_view label;  // report label
  bool needs_annotations;
};

inline constexpr std::array<MethodInfo, 9> kMethods{{
    {Method::Splines, "spline", "Splines", true},
    {Method::Fir, "fir", "FIR", false},
    {Method::Iir, "iir", "IIR", false},
    {Method::Lms, "lms", "AF", true},
    {Method::Maf, "maf", "MAF", false},
    {Method::Ica, "ica", "ICA", false},
    {Method::Issm, "issm", "ISSM", true},
    {Method::Emd, "emd", "EMD", false},
    {Method::Wavelet, "wavelet", "WT", false},
}};

/// Pass-through used to measure the raw contamination.
inline constexpr MethodInfo kIdentityMethod{Method::Identity, "identity", "Identity", false};

inline const MethodInfo& method_info(Method m) {
  if (m == Method::Identity) return kIdentityMethod;
  for (const auto& info : kMethods)
    if (info.id == m) return info;
  return kIdentityMethod;
}

inline std::string method_names_list() {
  std::string out;
  for (const auto& info : kMethods) out += (out.empty() ? "" : ", ") + std::string(info.key);
  return out;
}

/// Accepts the key or the report label, case-insensitively. "identity" only
/// when `allow_identity` is set.
inline std::optional<Method> method_from_name(std::string_view name, bool allow_identity = false) {
  auto lower = [](std::string_view s) {
    std::string r(s);
    for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
  };
  const std::string n = lower(name);
  for (const auto& info : kMethods)
    if (n == info.key || n == lower(info.label)) return info.id;
  if (n == "splines") return Method::Splines;
  if (allow_identity && n == kIdentityMethod.key) return Method::Identity;
  return std::nullopt;
}

inline void validate_config(const MethodConfig& c, double fs) {
  if (!(c.cutoff_hz > 0.0) || !(c.cutoff_hz < 0.5 * fs)) throw ParameterError("cutoff_hz must lie in (0, fs/2)");
  if (!(c.fir_transition_hz > 0.0)) throw ParameterError("fir_transition_hz must be positive");
  if (!(c.fir_stopband_db > 0.0)) throw ParameterError("fir_stopband_db must be positive");
  if (c.iir_order < 1) throw ParameterError("iir_order must be >= 1");
  if (!(c.spline_pr_offset_s >= 0.0) || !(c.spline_knot_window_s > 0.0))
    throw ParameterError("spline offsets and windows must be positive");
  if (!(c.lms_mu1 > 0.0) || !(c.lms_mu2 > 0.0)) throw ParameterError("LMS step sizes must be positive");
  if (c.lms_beat_window_s < 0.0 || c.maf_window_s < 0.0) throw ParameterError("window lengths must be positive");
  if (c.ica_channels < 2 || c.ica_delay_samples < 1) throw ParameterError("ICA needs >= 2 channels and delay >= 1");
  if (c.ica_max_iter < 1 || !(c.ica_tol > 0.0)) throw ParameterError("ICA iteration limits must be positive");
  if (!(c.issm_threshold >= 0.0) || c.issm_max_iter < 1) throw ParameterError("issm_max_iter must be >= 1");
  if (c.emd_max_imfs < 1 || !(c.emd_sift_tol > 0.0) || !(c.emd_blw_freq_hz > 0.0))
    throw ParameterError("EMD parameters must be positive");
  if (!(c.threshold_t1 >= 0.0) || !(c.threshold_t2 >= c.threshold_t1))
    throw ParameterError("wavelet thresholds need 0 <= t1 <= t2");
}

// ---------------------------------------------------------------------------
// Methods

/// Linear-phase FIR high-pass (Kaiser design), group delay compensated.
inline Signal fir_highpass(const Signal& s, const MethodConfig& cfg) {
  const auto h = dsp::design_fir_highpass(cfg.cutoff_hz, s.fs(), cfg.fir_transition_hz, cfg.fir_stopband_db);
  return s.with_samples(dsp::convolve_centered(s.samples(), h));
}

/// Butterworth high-pass applied forward and backward.
inline Signal iir_highpass_zero_phase(const Signal& s, const MethodConfig& cfg) {
  const auto filt = dsp::butterworth(cfg.iir_order, cfg.cutoff_hz, s.fs(), dsp::FilterBand::HighPass);
  return s.with_samples(filt.filtfilt(s.samples()));
}

/// Knot positions (PR isoelectric estimates) for the spline method.
inline std::vector<std::size_t> spline_knots(const BeatAnnotations& ann, double fs, const MethodConfig& cfg) {
  const auto offset = static_cast<std::size_t>(std::llround(cfg.spline_pr_offset_s * fs));
  std::vector<std::size_t> knots;
  for (std::size_t r : ann.r_peaks)
    if (r >= offset && (knots.empty() || r - offset > knots.back())) knots.push_back(r - offset);
  return knots;
}

/// Cubic-spline baseline through one isoelectric point per beat.
///
/// Knots sit spline_pr_offset_s before each R peak; each knot value is the
/// mean over a spline_knot_window_s window centred on it. The natural spline
/// is held constant before the first and after the last knot.
inline Signal spline_baseline(const Signal& s, const MethodConfig& cfg, const BeatAnnotations& ann) {
  const auto knots = spline_knots(ann, s.fs(), cfg);
  if (knots.size() < 3) throw InsufficientBeatsError("spline baseline needs at least three usable beats");
  const auto half = static_cast<std::size_t>(std::llround(0.5 * cfg.spline_knot_window_s * s.fs()));
  std::vector<double> kx, ky;
  for (std::size_t k : knots) {
    if (k >= s.size()) break;
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(s.size() - 1, k + half);
    double acc = 0.0;
    for (std::size_t m = lo; m <= hi; ++m) acc += s[m];
    kx.push_back(static_cast<double>(k));
    ky.push_back(acc / static_cast<double>(hi - lo + 1));
  }
  if (kx.size() < 3) throw InsufficientBeatsError("spline baseline needs at least three usable beats");
  const dsp::NaturalCubicSpline spline(std::move(kx), std::move(ky));
  const auto est = spline.sample_grid(s.size(), true);
  std::vector<double> out(s.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = s[m] - est[m];
  return s.with_samples(std::move(out));
}

/// Single-weight LMS canceller with constant reference 1:
/// e = x - w, w <- w + 2 mu e. Returns e (an adaptive high-pass).
inline std::vector<double> lms_dc_canceller(std::span<const double> x, double mu) {
  std::vector<double> e(x.size());
  double w = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    e[m] = x[m] - w;
    w += 2.0 * mu * e[m];
  }
  return e;
}

/// Beat window length (samples) used by the impulse-correlated stage.
inline std::size_t lms_window_length(const BeatAnnotations& ann, double fs, const MethodConfig& cfg) {
  std::size_t min_rr = 0;
  for (std::size_t i = 1; i < ann.r_peaks.size(); ++i) {
    const std::size_t rr = ann.r_peaks[i] - ann.r_peaks[i - 1];
    if (min_rr == 0 || rr < min_rr) min_rr = rr;
  }
  std::size_t len = 0;
  if (cfg.lms_beat_window_s > 0.0) {
    len = static_cast<std::size_t>(std::llround(cfg.lms_beat_window_s * fs));
  } else {
    if (min_rr == 0) throw WindowError("automatic LMS beat window needs at least two beats");
    len = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(min_rr)));
  }
  if (len == 0) throw WindowError("LMS beat window rounds to zero samples");
  if (min_rr != 0 && len > min_rr) throw WindowError("LMS beat window exceeds the shortest RR interval");
  return len;
}

/// Two-stage cascade LMS.
///
/// Stage 1 is the adaptive DC canceller (lms_mu1). Stage 2 is an
/// impulse-correlated adaptive filter: one weight per within-beat sample,
/// fed with the stage-1 baseline estimate in windows that start one third
/// of a window before each R peak. Inside windows the learned beat template
/// is added back to the stage-1 output; windows are joined as-is unless
/// lms_smooth_joins tapers the template at the window edges.
inline Signal lms_cascade(const Signal& s, const MethodConfig& cfg, const BeatAnnotations& ann) {
  if (ann.empty()) throw EmptyAnnotationError("LMS cascade needs R-peak annotations");
  const std::size_t n = s.size();
  const auto x = s.samples();
  const auto e1 = lms_dc_canceller(x, cfg.lms_mu1);
  const std::size_t len = lms_window_length(ann, s.fs(), cfg);
  const std::size_t pre = len / 3;

  std::vector<double> taper(len, 1.0);
  if (cfg.lms_smooth_joins) {
    const std::size_t ramp = std::max<std::size_t>(1, len / 10);
    for (std::size_t i = 0; i < ramp && i < len; ++i) {
      const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(ramp + 1));
      taper[i] = std::min(taper[i], w);
      taper[len - 1 - i] = std::min(taper[len - 1 - i], w);
    }
  }

  std::vector<double> out = e1;
  std::vector<double> weights(len, 0.0);
  for (std::size_t r : ann.r_peaks) {
    if (r >= n) break;
    const long long start = static_cast<long long>(r) - static_cast<long long>(pre);
    for (std::size_t i = 0; i < len; ++i) {
      const long long m = start + static_cast<long long>(i);
      if (m < 0 || m >= static_cast<long long>(n)) continue;
      const auto mi = static_cast<std::size_t>(m);
      const double primary = x[mi] - e1[mi];
      out[mi] = e1[mi] + taper[i] * weights[i];
      weights[i] += 2.0 * cfg.lms_mu2 * (primary - weights[i]);
    }
  }
  return s.with_samples(std::move(out));
}

/// Window length in samples for the moving-average method (odd, >= 3).
inline std::size_t maf_window_length(double fs, const MethodConfig& cfg) {
  const double raw = cfg.maf_window_s > 0.0 ? cfg.maf_window_s * fs : fs / cfg.cutoff_hz;
  if (raw < 3.0) throw WindowError("moving-average window must span at least 3 samples");
  auto len = static_cast<std::size_t>(std::llround(raw));
  if (len % 2 == 0) ++len;
  return len;
}

/// Moving-average baseline, zero-filled where the centred window is incomplete.
inline Signal moving_average(const Signal& s, const MethodConfig& cfg) {
  const std::size_t len = maf_window_length(s.fs(), cfg);
  const std::size_t n = s.size();
  if (len >= n) throw WindowError("moving-average window is not shorter than the signal");
  const std::size_t half = (len - 1) / 2;
  std::vector<double> out(s.samples().begin(), s.samples().end());
  double acc = 0.0;
  for (std::size_t m = 0; m < len; ++m) acc += s[m];
  for (std::size_t c = half; c + half < n; ++c) {
    if (c > half) acc += s[c + half] - s[c - half - 1];
    out[c] = s[c] - acc / static_cast<double>(len);
  }
  return s.with_samples(std::move(out));
}

struct IcaDiagnostics {
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> component_kurtosis;
  std::size_t zeroed = 0;
  double kurtosis_threshold = 0.0;
};

/// Delay-embedding ICA: components whose excess kurtosis is significantly
/// negative (below -ica_kurtosis_sigma * sqrt(24/n)) are zeroed and the
/// undelayed row is rebuilt from the rest.
inline Signal ica_denoise(const Signal& s, const MethodConfig& cfg, IcaDiagnostics* diag = nullptr) {
  const std::size_t n = s.size();
  const std::size_t max_delay = (cfg.ica_channels - 1) * cfg.ica_delay_samples;
  if (static_cast<double>(n) < static_cast<double>(max_delay) + 2.0 * s.fs())
    throw LengthError("signal too short for the ICA delay embedding");
  const auto emb = dsp::delay_embed(s.samples(), cfg.ica_channels, cfg.ica_delay_samples);
  const auto res = dsp::fastica(emb.rows, {cfg.ica_seed, cfg.ica_max_iter, cfg.ica_tol});

  const double threshold = -cfg.ica_kurtosis_sigma * std::sqrt(24.0 / static_cast<double>(n));
  const Eigen::Index k = res.components.rows();
  Eigen::RowVectorXd row0 = Eigen::RowVectorXd::Constant(static_cast<Eigen::Index>(n), res.mean(0));
  IcaDiagnostics d;
  d.converged = res.converged;
  d.iterations = res.iterations;
  d.kurtosis_threshold = threshold;
  std::vector<double> comp(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < n; ++m) comp[m] = res.components(i, static_cast<Eigen::Index>(m));
    const double kurt = dsp::kurtosis(comp);
    d.component_kurtosis.push_back(kurt);
    if (kurt < threshold) {
      ++d.zeroed;
      continue;
    }
    row0 += res.mixing(0, i) * res.components.row(i);
  }
  if (diag) *diag = std::move(d);
  return s.with_samples(std::vector<double>(row0.data(), row0.data() + row0.size()));
}

struct IssmResult {
  Signal output;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Segment boundaries [b_k, b_{k+1}) at every R peak, including the head and tail.
inline std::vector<std::size_t> rr_segment_bounds(const BeatAnnotations& ann, std::size_t n) {
  std::vector<std::size_t> b{0};
  for (std::size_t r : ann.r_peaks)
    if (r > b.back() && r < n) b.push_back(r);
  b.push_back(n);
  return b;
}

inline double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Iterated subtraction of per-RR-segment medians until every segment
/// median is within issm_threshold of zero.
inline IssmResult issm_detail(const Signal& s, const MethodConfig& cfg, const BeatAnnotations& ann) {
  if (ann.size() < 2) throw InsufficientBeatsError("ISSM needs at least two R peaks");
  const auto bounds = rr_segment_bounds(ann, s.size());
  std::vector<double> y(s.samples().begin(), s.samples().end());
  IssmResult res{s, false, 0};
  for (std::size_t it = 1; it <= cfg.issm_max_iter; ++it) {
    res.iterations = it;
    std::vector<double> medians;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
      const double med = median_of({y.begin() + static_cast<std::ptrdiff_t>(bounds[k]),
                                    y.begin() + static_cast<std::ptrdiff_t>(bounds[k + 1])});
      medians.push_back(med);
      worst = std::max(worst, std::abs(med));
    }
    if (worst <= cfg.issm_threshold) {
      res.converged = true;
      break;
    }
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k)
      for (std::size_t m = bounds[k]; m < bounds[k + 1]; ++m) y[m] -= medians[k];
  }
  res.output = s.with_samples(std::move(y));
  return res;
}

inline Signal issm_denoise(const Signal& s, const MethodConfig& cfg, const BeatAnnotations& ann) {
  return issm_detail(s, cfg, ann).output;
}

/// EMD baseline: residual plus every IMF whose zero-crossing frequency is
/// below emd_blw_freq_hz, smoothed by the zero-phase Butterworth low-pass at
/// cutoff_hz, then subtracted.
inline Signal emd_denoise(const Signal& s, const MethodConfig& cfg) {
  const auto set = dsp::emd_sift(s, cfg.emd_max_imfs, cfg.emd_sift_tol);
  std::vector<double> est(set.residual.samples().begin(), set.residual.samples().end());
  for (const auto& imf : set.imfs) {
    if (dsp::zero_crossing_frequency(imf) >= cfg.emd_blw_freq_hz) continue;
    for (std::size_t m = 0; m < est.size(); ++m) est[m] += imf[m];
  }
  const auto lp = dsp::butterworth(cfg.iir_order, cfg.cutoff_hz, s.fs(), dsp::FilterBand::LowPass);
  const auto smooth = lp.filtfilt(est);
  std::vector<double> out(s.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = s[m] - smooth[m];
  return s.with_samples(std::move(out));
}

inline std::size_t auto_wavelet_level(double fs, double cutoff_hz) {
  const double l = std::floor(std::log2(fs / (2.0 * cutoff_hz)));
  if (l < 1.0) throw LevelError("cutoff too close to Nyquist for a wavelet baseline");
  return static_cast<std::size_t>(l);
}

/// DWT baseline removal: the level-L approximation is zeroed and, when
/// threshold_t2 > 0, the two coarsest detail bands are semi-soft thresholded.
inline Signal wavelet_denoise(const Signal& s, const MethodConfig& cfg) {
  const auto w = dsp::wavelet_by_name(cfg.wavelet_name);
  const std::size_t level = cfg.wavelet_level > 0 ? cfg.wavelet_level : auto_wavelet_level(s.fs(), cfg.cutoff_hz);
  auto dec = dsp::wavedec(s.samples(), w, level);
  std::fill(dec.approximation.begin(), dec.approximation.end(), 0.0);
  if (cfg.threshold_t2 > 0.0) {
    for (std::size_t l = level; l-- > 0 && l + 2 >= level;)
      for (double& c : dec.details[l]) c = dsp::semi_soft_threshold(c, cfg.threshold_t1, cfg.threshold_t2);
  }
  return s.with_samples(dsp::waverec(dec));
}

/// Uniform entry point. Annotation-based methods detect R peaks on the input
/// when no annotations are supplied.
inline Signal denoise(Method method, const Signal& s, const MethodConfig& cfg,
                      const BeatAnnotations* annotations = nullptr) {
  validate_config(cfg, s.fs());
  std::optional<BeatAnnotations> detected;
  auto ann = [&]() -> const BeatAnnotations& {
    if (annotations) return *annotations;
    if (!detected) detected = detect_r_peaks(s);
    return *detected;
  };
  switch (method) {
    case Method::Splines: return spline_baseline(s, cfg, ann());
    case Method::Fir: return fir_highpass(s, cfg);
    case Method::Iir: return iir_highpass_zero_phase(s, cfg);
    case Method::Lms: return lms_cascade(s, cfg, ann());
    case Method::Maf: return moving_average(s, cfg);
    case Method::Ica: return ica_denoise(s, cfg);
    case Method::Issm: return issm_denoise(s, cfg, ann());
    case Method::Emd: return emd_denoise(s, cfg);
    case Method::Wavelet: return wavelet_denoise(s, cfg);
    case Method::Identity: return s;
  }
  return s;
}

}  // namespace blw
