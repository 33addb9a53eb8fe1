#include <gtest/gtest.h>

#include "blw/denoise.hpp"
#include "blw/generators.hpp"
#include "blw/metrics.hpp"
#include "test_util.hpp"

using namespace blw;

namespace {

Signal clean_ecg(double seconds) {
  EcgSynthSpec spec;
  spec.duration = seconds;
  return synth_ecg(spec);
}

double interior_mad(const Signal& a, const Signal& b, std::size_t margin) {
  double m = 0.0;
  for (std::size_t i = margin; i + margin < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Maf, WorkedExample) {
  MethodConfig cfg;
  cfg.maf_window_s = 3.0;
  const auto y = moving_average(Signal({1, 2, 3, 4, 5}, 1.0), cfg);
  EXPECT_EQ(y.vector(), (std::vector<double>{1, 0, 0, 0, 5}));
}

TEST(Maf, WindowLength) {
  MethodConfig cfg;
  EXPECT_EQ(maf_window_length(360.0, cfg), 537u);  // 360 / 0.67 = 537.3
  cfg.maf_window_s = 0.5;
  EXPECT_EQ(maf_window_length(100.0, cfg), 51u);
  cfg.maf_window_s = 0.01;
  EXPECT_THROW(maf_window_length(100.0, cfg), WindowError);
}

TEST(Maf, ConstantInputVanishesInside) {
  MethodConfig cfg;
  cfg.maf_window_s = 1.0;
  const auto y = moving_average(Signal(std::vector<double>(1000, 2.5), 100.0), cfg);
  for (std::size_t i = 50; i < 950; ++i) EXPECT_NEAR(y[i], 0.0, 1e-12);
}

TEST(Spline, KnotOffset) {
  const BeatAnnotations ann{{1000, 1200}, 250.0};
  const auto k = spline_knots(ann, 250.0, MethodConfig{});
  ASSERT_EQ(k.size(), 2u);
  EXPECT_EQ(k[0], 983u);
  EXPECT_EQ(k[1], 1183u);
  EXPECT_TRUE(spline_knots(BeatAnnotations{{5}, 250.0}, 250.0, MethodConfig{}).empty());
}

TEST(Spline, CleanSignalLeftNearlyIntact) {
  const auto s = clean_ecg(30.0);
  const auto y = denoise(Method::Splines, s, MethodConfig{});
  EXPECT_LE(mad(s, y), 0.1);
}

TEST(Spline, RemovesLinearDrift) {
  const auto s = clean_ecg(30.0);
  std::vector<double> drift(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) drift[i] = s[i] + 1e-4 * static_cast<double>(i);
  const Signal noisy(drift, s.fs());
  const auto a = denoise(Method::Splines, s, MethodConfig{});
  const auto b = denoise(Method::Splines, noisy, MethodConfig{});
  // a linear trend through the knots is reproduced exactly by the spline
  EXPECT_LE(interior_mad(a, b, 360), 1e-9);
}

TEST(Spline, TooFewBeats) {
  const auto s = clean_ecg(10.0);
  EXPECT_THROW(spline_baseline(s, MethodConfig{}, BeatAnnotations{{400, 800}, 360.0}), InsufficientBeatsError);
}

TEST(Lms, DcCancellerDecaysGeometrically) {
  const std::vector<double> x(50, 1.0);
  const auto e = lms_dc_canceller(x, 0.05);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(e[k], std::pow(0.9, static_cast<double>(k)), 1e-12);
}

TEST(Lms, ZeroInZeroOut) {
  const Signal z(std::vector<double>(3600, 0.0), 360.0);
  const BeatAnnotations ann{{200, 380, 560, 740, 920}, 360.0};
  const auto y = lms_cascade(z, MethodConfig{}, ann);
  for (double v : y.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Lms, WindowLength) {
  const BeatAnnotations ann{{100, 280, 470}, 360.0};
  EXPECT_EQ(lms_window_length(ann, 360.0, MethodConfig{}), 144u);  // 0.8 x 180
  MethodConfig cfg;
  cfg.lms_beat_window_s = 0.6;  // 216 > 180
  EXPECT_THROW(lms_window_length(ann, 360.0, cfg), WindowError);
  EXPECT_THROW(lms_window_length(BeatAnnotations{{100}, 360.0}, 360.0, MethodConfig{}), WindowError);
}

TEST(Lms, OutsideWindowsEqualsStageOne) {
  const auto s = clean_ecg(10.0);
  const BeatAnnotations ann{{1000, 1180, 1360}, 360.0};
  const auto y = lms_cascade(s, MethodConfig{}, ann);
  const auto e1 = lms_dc_canceller(s.samples(), MethodConfig{}.lms_mu1);
  for (std::size_t i = 0; i < 900; ++i) EXPECT_EQ(y[i], e1[i]);
  for (std::size_t i = 2000; i < s.size(); ++i) EXPECT_EQ(y[i], e1[i]);
}

TEST(Issm, PiecewiseConstantClearedByOnePass) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i < 300 ? 0.4 : (i < 700 ? -0.2 : 1.1);
  const BeatAnnotations ann{{300, 700}, 100.0};
  const auto r = issm_detail(Signal(v, 100.0), MethodConfig{}, ann);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 2u);  // one subtraction, then the check
  for (double x : r.output.samples()) EXPECT_EQ(x, 0.0);
}

TEST(Issm, ZeroInputConvergesImmediately) {
  const auto r = issm_detail(Signal(std::vector<double>(500, 0.0), 100.0), MethodConfig{}, BeatAnnotations{{100, 300}, 100.0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
}

TEST(Issm, SegmentMediansEndNearZero) {
  const auto s = clean_ecg(20.0);
  const auto noisy = contaminate(s, synth_sine_blw(0.6, 360.0, 20.0, 1.0), ContaminationSpec{}).noisy;
  const auto ann = detect_r_peaks(noisy);
  const MethodConfig cfg;
  const auto r = issm_detail(noisy, cfg, ann);
  ASSERT_TRUE(r.converged);
  const auto b = rr_segment_bounds(ann, noisy.size());
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    std::vector<double> seg(r.output.samples().begin() + static_cast<std::ptrdiff_t>(b[k]),
                            r.output.samples().begin() + static_cast<std::ptrdiff_t>(b[k + 1]));
    EXPECT_LE(std::abs(median_of(seg)), cfg.issm_threshold);
  }
}

TEST(Issm, MedianOf) {
  EXPECT_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median_of({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(issm_detail(Signal({1.0, 2.0}, 1.0), MethodConfig{}, BeatAnnotations{{1}, 1.0}), InsufficientBeatsError);
}

TEST(Emd, CleanInputMostlyUntouched) {
  const auto s = clean_ecg(30.0);
  EXPECT_LE(interior_mad(s, denoise(Method::Emd, s, MethodConfig{}), 360), 0.15);
}

TEST(Wavelet, AutoLevel) {
  EXPECT_EQ(auto_wavelet_level(360.0, 0.67), 8u);
  EXPECT_EQ(auto_wavelet_level(250.0, 0.67), 7u);
  EXPECT_THROW(auto_wavelet_level(2.0, 0.67), LevelError);
}

TEST(Wavelet, RemovesConstantOffset) {
  const auto s = clean_ecg(30.0);
  std::vector<double> v(s.samples().begin(), s.samples().end());
  for (double& x : v) x += 3.0;
  const auto a = denoise(Method::Wavelet, s, MethodConfig{});
  const auto b = denoise(Method::Wavelet, Signal(v, s.fs()), MethodConfig{});
  EXPECT_LE(interior_mad(a, b, 720), 1e-3);
}

TEST(AllMethods, UniformContract) {
  const auto clean = clean_ecg(30.0);
  const auto noisy = contaminate(clean, synth_sine_blw(0.6, 360.0, 30.0, 1.0), ContaminationSpec{}).noisy;
  for (const auto& info : kMethods) {
    const auto y = denoise(info.id, noisy, MethodConfig{});
    EXPECT_EQ(y.size(), noisy.size()) << info.key;
    EXPECT_EQ(y.fs(), noisy.fs()) << info.key;
    for (double v : y.samples()) ASSERT_TRUE(std::isfinite(v)) << info.key;
  }
  EXPECT_EQ(denoise(Method::Identity, noisy, MethodConfig{}), noisy);
}

TEST(AllMethods, InvalidConfigRejected) {
  const auto s = clean_ecg(10.0);
  MethodConfig cfg;
  cfg.cutoff_hz = 200.0;
  EXPECT_THROW(denoise(Method::Fir, s, cfg), ParameterError);
  cfg = {};
  cfg.threshold_t1 = 2.0;
  cfg.threshold_t2 = 1.0;
  EXPECT_THROW(denoise(Method::Wavelet, s, cfg), ParameterError);
}

TEST(Config, SerializeRoundTrip) {
  MethodConfig cfg;
  cfg.cutoff_hz = 0.5;
  cfg.lms_smooth_joins = true;
  cfg.wavelet_name = "db6";
  cfg.ica_seed = 7;
  cfg.lms_mu1 = 0.1 + 0.2;  // not exactly representable in short decimal
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
  EXPECT_EQ(parse_config(serialize_config(MethodConfig{})), MethodConfig{});
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(parse_config("bogus = 1\n"), ParseError);
  EXPECT_THROW(parse_config("cutoff_hz = fast\n"), ParseError);
  EXPECT_THROW(parse_config("lms_smooth_joins = maybe\n"), ParseError);
  try {
    parse_config("# c\ncutoff_hz = 1\nno equals sign\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  MethodConfig base;
  base.iir_order = 6;
  EXPECT_EQ(parse_config("cutoff_hz = 0.5\n", base).iir_order, 6);
}

TEST(Config, KeysAndAccessors) {
  const auto keys = config_keys();
  EXPECT_EQ(keys.size(), config_to_map(MethodConfig{}).size());
  EXPECT_EQ(get_config_value(MethodConfig{}, "cutoff_hz"), "0.67");
  MethodConfig cfg;
  set_config_value(cfg, "wavelet_level", "5");
  EXPECT_EQ(cfg.wavelet_level, 5u);
  EXPECT_THROW(get_config_value(cfg, "nope"), ParseError);
}

TEST(MethodNames, Lookup) {
  EXPECT_EQ(method_from_name("FIR"), Method::Fir);
  EXPECT_EQ(method_from_name("wt"), Method::Wavelet);
  EXPECT_EQ(method_from_name("Splines"), Method::Splines);
  EXPECT_EQ(method_from_name("af"), Method::Lms);
  EXPECT_FALSE(method_from_name("identity").has_value());
  EXPECT_EQ(method_from_name("identity", true), Method::Identity);
  EXPECT_FALSE(method_from_name("kalman").has_value());
  EXPECT_EQ(method_names_list(), "spline, fir, iir, lms, maf, ica, issm, emd, wavelet");
}
