#include <gtest/gtest.h>

#include <complex>

#include "blw/denoise.hpp"
#include "blw/dsp/fir.hpp"
#include "blw/dsp/iir.hpp"
#include "blw/dsp/padding.hpp"
#include "blw/dsp/window.hpp"
#include "test_util.hpp"

using namespace blw;
using namespace blw::dsp;

namespace {

// Independent DTFT evaluation, kept separate from fir_response.
double dtft_magnitude(const std::vector<double>& h, double f, double fs) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double ph = 2.0 * std::numbers::pi * f / fs * static_cast<double>(k);
    re += h[k] * std::cos(ph);
    im -= h[k] * std::sin(ph);
  }
  return std::hypot(re, im);
}

// Closed-form bilinear Butterworth high-pass magnitude.
double butterworth_hp_magnitude(int order, double fc, double f, double fs) {
  const double r = std::tan(std::numbers::pi * fc / fs) / std::tan(std::numbers::pi * f / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

double butterworth_lp_magnitude(int order, double fc, double f, double fs) {
  const double r = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

std::size_t xcorr_peak_lag(std::span<const double> a, std::span<const double> b, int max_lag) {
  int best = 0;
  double best_v = -1e300;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t i = static_cast<std::size_t>(max_lag); i + static_cast<std::size_t>(max_lag) < a.size(); ++i)
      acc += a[i] * b[static_cast<std::size_t>(static_cast<long long>(i) + lag)];
    if (acc > best_v) {
      best_v = acc;
      best = lag;
    }
  }
  return static_cast<std::size_t>(std::abs(best));
}

}  // namespace

TEST(Kaiser, BetaAt40dB) {
  // 0.5842 * 19^0.4 + 0.07886 * 19, evaluated by hand
  EXPECT_NEAR(kaiser_beta(40.0), 3.3953, 1e-3);
  EXPECT_NEAR(kaiser_beta(60.0), 0.1102 * 51.3, 1e-12);
  EXPECT_EQ(kaiser_beta(20.0), 0.0);
}

TEST(Kaiser, WindowShape) {
  const auto w = kaiser_window(51, 3.0);
  EXPECT_DOUBLE_EQ(w[25], 1.0);
  for (std::size_t k = 0; k < 25; ++k) EXPECT_NEAR(w[k], w[50 - k], 1e-15);
  EXPECT_LT(w[0], w[10]);
  EXPECT_EQ(kaiser_length(40.0, 0.01) % 2, 1u);
}

TEST(ReflectPad, OddReflection) {
  const std::vector<double> x{1.0, 2.0, 4.0};
  const auto p = reflect_pad(x, 2, 2);
  // 2*x0 - x[2], 2*x0 - x[1], x..., 2*x2 - x[1], 2*x2 - x[0]
  EXPECT_EQ(p, (std::vector<double>{-2.0, 0.0, 1.0, 2.0, 4.0, 6.0, 7.0}));
}

TEST(ReflectPad, LongerThanSignalKeepsLinearTrend) {
  const std::vector<double> x{0.0, 1.0, 2.0};
  const auto p = reflect_pad(x, 7, 7);
  ASSERT_EQ(p.size(), 17u);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], static_cast<double>(i) - 7.0, 1e-12);
}

TEST(FirDesign, MeetsResponseAtDefaults) {
  const auto h = design_fir_highpass(0.67, 360.0, 0.5, 40.0);
  EXPECT_EQ(h.size() % 2, 1u);
  EXPECT_LE(dtft_magnitude(h, 0.0, 360.0), 0.01);
  EXPECT_NEAR(dtft_magnitude(h, 5.0, 360.0), 1.0, 0.02);
  // both evaluation routes agree
  EXPECT_NEAR(std::abs(fir_response(h, 5.0, 360.0)), dtft_magnitude(h, 5.0, 360.0), 1e-12);
}

TEST(FirDesign, CoefficientSumIsDcGain) {
  for (double fc : {0.3, 0.67, 2.0}) {
    const auto h = design_fir_highpass(fc, 250.0, 0.5, 40.0);
    double sum = 0.0;
    for (double v : h) sum += v;
    EXPECT_NEAR(sum, 0.0, 1e-12);
  }
}

TEST(FirDesign, LinearPhaseSymmetry) {
  const auto h = design_fir_highpass(0.67, 360.0, 0.5, 40.0);
  for (std::size_t k = 0; k < h.size() / 2; ++k) EXPECT_NEAR(h[k], h[h.size() - 1 - k], 1e-15);
}

TEST(FirDesign, StopbandBelowLowerEdge) {
  // the Kaiser length formula is an estimate; allow a few dB short of the 40 dB target
  const auto h = design_fir_highpass(0.67, 360.0, 0.5, 40.0);
  for (double f = 0.0; f <= 0.42; f += 0.02) EXPECT_LE(dtft_magnitude(h, f, 360.0), 0.02) << f;
}

TEST(FirDesign, InfeasibleTransition) {
  EXPECT_THROW(design_fir_highpass(0.67, 360.0, 0.01, 40.0), DesignError);
  EXPECT_THROW(design_fir_highpass(200.0, 360.0, 0.5, 40.0), DesignError);
  EXPECT_THROW(design_fir_highpass(0.67, 360.0, 0.0, 40.0), DesignError);
}

TEST(FirHighpass, AttenuatesSlowSine) {
  const auto s = test::sine(0.2, 360.0, 360 * 60);
  const auto y = fir_highpass(s, MethodConfig{});
  EXPECT_LE(test::rms(y.samples()), 0.05 * test::rms(s.samples()));
}

TEST(FirHighpass, PassesFiveHertzInPhase) {
  const auto s = test::sine(5.0, 360.0, 360 * 20);
  const auto y = fir_highpass(s, MethodConfig{});
  const std::size_t n = s.size();
  double peak = 0.0;
  for (std::size_t i = n / 4; i < 3 * n / 4; ++i) peak = std::max(peak, std::abs(y[i]));
  EXPECT_NEAR(peak, 1.0, 0.02);
  EXPECT_LE(xcorr_peak_lag(s.samples(), y.samples(), 20), 1u);
}

TEST(FirHighpass, PreservesLengthAndRate) {
  const auto s = test::sine(3.0, 250.0, 1000);
  const auto y = fir_highpass(s, MethodConfig{});
  EXPECT_EQ(y.size(), s.size());
  EXPECT_EQ(y.fs(), s.fs());
}

TEST(Butterworth, MatchesClosedFormMagnitude) {
  for (int order : {1, 2, 3, 4, 6}) {
    const auto hp = butterworth(order, 0.67, 360.0, FilterBand::HighPass);
    const auto lp = butterworth(order, 15.0, 360.0, FilterBand::LowPass);
    for (double f : {0.1, 0.3, 0.67, 1.0, 5.0, 40.0, 150.0}) {
      EXPECT_NEAR(std::abs(hp.response(f, 360.0)), butterworth_hp_magnitude(order, 0.67, f, 360.0), 1e-9)
          << order << " " << f;
      EXPECT_NEAR(std::abs(lp.response(f, 360.0)), butterworth_lp_magnitude(order, 15.0, f, 360.0), 1e-9)
          << order << " " << f;
    }
  }
}

TEST(Butterworth, CutoffIsHalfPower) {
  const auto hp = butterworth(4, 0.67, 360.0, FilterBand::HighPass);
  EXPECT_NEAR(std::abs(hp.response(0.67, 360.0)), std::sqrt(0.5), 1e-9);
  EXPECT_LT(hp.max_pole_radius(), 1.0);
}

TEST(Butterworth, InvalidArguments) {
  EXPECT_THROW(butterworth(0, 1.0, 360.0, FilterBand::HighPass), ParameterError);
  EXPECT_THROW(butterworth(2, 180.0, 360.0, FilterBand::LowPass), ParameterError);
}

TEST(IirHighpass, ZeroPhaseOnFiveHertz) {
  const auto s = test::sine(5.0, 360.0, 360 * 10);
  const auto y = iir_highpass_zero_phase(s, MethodConfig{});
  EXPECT_EQ(xcorr_peak_lag(s.samples(), y.samples(), 20), 0u);
}

TEST(IirHighpass, RemovesConstant) {
  const Signal s(std::vector<double>(3600, 1.0), 360.0);
  const auto y = iir_highpass_zero_phase(s, MethodConfig{});
  for (double v : y.samples()) EXPECT_LE(std::abs(v), 1e-3);
}

TEST(IirHighpass, SquaredMagnitudeOnSine) {
  // forward-backward applies |H|^2; checked away from the ends
  const double f = 1.0;
  const auto s = test::sine(f, 360.0, 360 * 60);
  const auto y = iir_highpass_zero_phase(s, MethodConfig{});
  const double expected = std::pow(butterworth_hp_magnitude(4, 0.67, f, 360.0), 2);
  double peak = 0.0;
  for (std::size_t i = 360 * 20; i < 360 * 40; ++i) peak = std::max(peak, std::abs(y[i]));
  EXPECT_NEAR(peak, expected, 2e-3);
}

TEST(LinearMethods, HomogeneityAndAdditivity) {
  const auto a = test::sine(0.4, 360.0, 3600, 1.0);
  const Signal b(test::white(3600, 7), 360.0);
  const MethodConfig cfg;
  for (Method m : {Method::Fir, Method::Iir, Method::Maf}) {
    const auto ya = denoise(m, a, cfg);
    const auto yb = denoise(m, b, cfg);
    const auto y3a = denoise(m, scaled(a, 3.0), cfg);
    const auto yab = denoise(m, add(a, b), cfg);
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) scale = std::max({scale, std::abs(ya[i]), std::abs(yb[i])});
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(y3a[i], 3.0 * ya[i], 1e-9 * 3.0 * scale);
      EXPECT_NEAR(yab[i], ya[i] + yb[i], 1e-9 * scale);
    }
  }
}
