#include <gtest/gtest.h>

#include <algorithm>

#include "blw/generators.hpp"
#include "blw/ingest.hpp"
#include "test_util.hpp"

using namespace blw;

TEST(SynthEcg, FiveMinutesAt120Bpm) {
  const auto r = synth_ecg_with_events(EcgSynthSpec{});
  EXPECT_EQ(r.ecg.size(), 108000u);
  EXPECT_EQ(r.ecg.fs(), 360.0);
  EXPECT_NEAR(static_cast<double>(r.r_events.size()), 600.0, 2.0);
}

TEST(SynthEcg, BeatCountFollowsHeartRate) {
  EcgSynthSpec spec;
  spec.hr = 70.0;
  EXPECT_NEAR(static_cast<double>(synth_ecg_with_events(spec).r_events.size()), 350.0, 2.0);
}

TEST(SynthEcg, AmplitudeRange) {
  EcgSynthSpec spec;
  spec.duration = 30.0;
  const auto s = synth_ecg(spec);
  const auto [lo, hi] = std::minmax_element(s.samples().begin(), s.samples().end());
  EXPECT_NEAR(*lo, -0.4, 1e-9);
  EXPECT_NEAR(*hi, 1.2, 1e-9);
}

TEST(SynthEcg, RPeakIsLocalMaximumNearEvent) {
  EcgSynthSpec spec;
  spec.duration = 20.0;
  const auto r = synth_ecg_with_events(spec);
  for (std::size_t k = 1; k + 1 < r.r_events.size(); ++k) {
    const std::size_t e = r.r_events[k];
    std::size_t best = e - 10;
    for (std::size_t i = e - 10; i <= e + 10; ++i)
      if (r.ecg[i] > r.ecg[best]) best = i;
    EXPECT_LE(best > e ? best - e : e - best, 4u) << k;
  }
}

TEST(SynthEcg, DeterministicAndJitterSeeded) {
  EcgSynthSpec spec;
  spec.duration = 10.0;
  EXPECT_EQ(synth_ecg(spec), synth_ecg(spec));
  spec.rr_jitter = 0.05;
  EXPECT_EQ(synth_ecg(spec), synth_ecg(spec));
}

TEST(SynthEcg, InvalidSpec) {
  EcgSynthSpec spec;
  spec.duration = 0.0;
  EXPECT_THROW(synth_ecg(spec), Error);
  spec = {};
  spec.hr = 0.0;
  EXPECT_THROW(synth_ecg(spec), Error);
  spec = {};
  spec.fs = -1.0;
  EXPECT_THROW(synth_ecg(spec), Error);
}

TEST(Morphology, DefaultsFileMatchesBuiltIn) {
  const auto m = load_morphology(std::string(BLW_SOURCE_DATA_DIR) + "/morphology_default.txt");
  const auto d = default_morphology();
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(m[i].name, d[i].name);
    EXPECT_NEAR(m[i].theta, d[i].theta, 1e-15);
    EXPECT_EQ(m[i].a, d[i].a);
    EXPECT_EQ(m[i].b, d[i].b);
  }
}

TEST(Morphology, ParseErrors) {
  EXPECT_THROW(parse_morphology("P 0 1\n"), ParseError);
  EXPECT_THROW(parse_morphology("P 0 1 1\nX 0 1 1\n"), ParseError);
  EXPECT_THROW(parse_morphology("P 0 1 1\n"), ParseError);
  try {
    parse_morphology("# c\nP 0 1 1\nQ zero 1 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(SineBlw, PeakIsAmplitude) {
  const auto s = synth_sine_blw(0.6, 360.0, 300.0, 1.0);
  EXPECT_EQ(s.size(), 108000u);
  double peak = 0.0;
  for (double v : s.samples()) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 1.0, 1e-6);
  EXPECT_EQ(s[0], 0.0);
}

TEST(SineBlw, ZeroAmplitudeAndErrors) {
  const auto flat = synth_sine_blw(0.6, 360.0, 2.0, 0.0);
  for (double v : flat.samples()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(synth_sine_blw(0.0, 360.0, 2.0, 1.0), ParameterError);
  EXPECT_THROW(synth_sine_blw(200.0, 360.0, 2.0, 1.0), ParameterError);
  EXPECT_THROW(synth_sine_blw(0.6, 0.0, 2.0, 1.0), RateError);
}

TEST(CompositeBlw, SumOfParts) {
  const auto c = synth_composite_blw({{0.3, 1.0, 0.0}, {0.7, 0.5, 1.0}}, 250.0, 4.0);
  const auto a = test::sine(0.3, 250.0, 1000, 1.0);
  const auto b = test::sine(0.7, 250.0, 1000, 0.5, 1.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], a[i] + b[i], 1e-12);
  EXPECT_THROW(synth_composite_blw({}, 250.0, 4.0), ParameterError);
}

namespace {

double max_dev(const Signal& a, const Signal& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Contaminate, HitsTargetMad) {
  EcgSynthSpec spec;
  spec.duration = 20.0;
  const auto clean = synth_ecg(spec);
  const auto sine = synth_sine_blw(0.6, 360.0, 20.0, 3.0);
  const auto c1 = contaminate(clean, sine, ContaminationSpec{});
  EXPECT_NEAR(max_dev(c1.noisy, clean), 0.5, 1e-9);
  const auto comp = synth_composite_blw({{0.2, 1.0, 0.0}, {0.45, 0.8, 0.3}}, 360.0, 20.0);
  const auto c2 = contaminate(clean, comp, ContaminationSpec{NoiseKind::RealRecord, 0.25});
  EXPECT_NEAR(max_dev(c2.noisy, clean), 0.25, 1e-9);
}

TEST(Contaminate, WorkedScales) {
  const Signal clean({0.0, 0.0, 0.0}, 1.0);
  const Signal half({0.5, -0.2, 0.1}, 1.0);
  EXPECT_DOUBLE_EQ(contaminate(clean, half, {NoiseKind::RealRecord, 0.5}).scale, 1.0);
  const Signal n({0.0, 2.0, -1.0}, 1.0);
  const auto c = contaminate(clean, n, {NoiseKind::RealRecord, 0.5});
  EXPECT_DOUBLE_EQ(c.scale, 0.25);
  EXPECT_EQ(c.noisy.vector(), (std::vector<double>{0.0, 0.5, -0.25}));
}

TEST(Contaminate, TruncatesLongerNoise) {
  const Signal clean({1.0, 1.0}, 1.0);
  const Signal n({1.0, -1.0, 100.0}, 1.0);
  const auto c = contaminate(clean, n, {NoiseKind::RealRecord, 0.5});
  EXPECT_EQ(c.noisy.vector(), (std::vector<double>{1.5, 0.5}));
}

TEST(Contaminate, Errors) {
  const Signal clean({1.0, 1.0, 1.0}, 10.0);
  EXPECT_THROW(contaminate(clean, Signal({0.0, 0.0, 0.0}, 10.0), {NoiseKind::RealRecord, 0.5}), ParameterError);
  EXPECT_THROW(contaminate(clean, Signal({1.0, 0.0, 1.0}, 20.0), {NoiseKind::RealRecord, 0.5}), RateError);
  EXPECT_THROW(contaminate(clean, Signal({1.0, 0.0}, 10.0), {NoiseKind::RealRecord, 0.5}), LengthError);
  EXPECT_THROW(contaminate(clean, Signal({1.0, 0.0, 1.0}, 10.0), {NoiseKind::RealRecord, 0.0}), ParameterError);
}
