// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "binharm/errors.hpp"
#include "binharm/signal.hpp"
#include "helpers.hpp"

using namespace binharm;
using namespace binharm::testing;

TEST_SUITE("signal") {

TEST_CASE("level convention: an RMS of 1 is 100 dB SPL") {
  CHECK(level_to_amplitude(100.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(level_to_amplitude(80.0) == doctest::Approx(std::sqrt(2.0) / 10.0));
  CHECK(amplitude_to_level(level_to_amplitude(37.25)) == doctest::Approx(37.25));
  const auto x = cosine(1000.0, 48000.0, 48000, level_to_amplitude(65.0));
  CHECK(rms_level(x) == doctest::Approx(65.0).epsilon(1e-6));
  CHECK_THROWS_AS(level_to_amplitude(std::nan("")), ValidationError);
  CHECK_THROWS_AS(level_to_amplitude(INFINITY), ValidationError);
}

TEST_CASE("add_tone matches the closed-form cosine") {
  const double fs = 48000.0;
  std::vector<double> out(19200, 0.0);
  add_tone(out, 780.06, 0.3, 1.1, fs);
  const auto ref = cosine(780.06, fs, out.size(), 0.3, 1.1);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) worst = std::max(worst, std::abs(out[i] - ref[i]));
  CHECK(worst < 1e-11);
}

TEST_CASE("add_tones equals repeated add_tone") {
  const double fs = 48000.0;
  const std::vector<double> f = {640, 680, 720, 760, 840, 880, 920};
  const std::vector<double> ph = {0.1, 2.0, 3.0, 4.0, 5.0, 6.0, 0.5};
  std::vector<double> a(4801, 0.0), b(4801, 0.0);
  add_tones(a, f, 0.2, ph, fs);
  for (std::size_t k = 0; k < f.size(); ++k) add_tone(b, f[k], 0.2, ph[k], fs);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("hann gate: zero endpoints, raised-cosine ramps, untouched plateau") {
  const double fs = 48000.0;
  MonoSignal s(std::vector<double>(19200, 1.0), fs);
  const MonoSignal g = hann_gate(s, 0.025);
  const std::size_t ramp = 1200;
  CHECK(g[0] == 0.0);
  CHECK(g[g.size() - 1] == doctest::Approx(0.0));
  CHECK(g[ramp / 2] == doctest::Approx(0.5));
  for (std::size_t i = ramp; i < g.size() - ramp; ++i) REQUIRE(g[i] == 1.0);
  for (std::size_t i = 1; i < ramp; ++i) REQUIRE(g[i] > g[i - 1]);
  // symmetric
  for (std::size_t i = 0; i < ramp; ++i) REQUIRE(g[i + 1] == doctest::Approx(g[g.size() - 2 - i]));
  CHECK_THROWS_AS(hann_gate(MonoSignal(std::vector<double>(100, 1.0), fs), 0.025), ValidationError);
}

TEST_CASE("downsample picks every k-th sample") {
  MonoSignal s(48, 48000.0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
  const MonoSignal d = downsample(s, 2000.0);
  REQUIRE(d.size() == 2);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 24.0);
  CHECK(d.sample_rate == 2000.0);
  CHECK_THROWS_AS(downsample(s, 7000.0), ValidationError);
}

TEST_CASE("gaussian noise has the requested spread and is seed-deterministic") {
  Rng a(5), b(5);
  const MonoSignal x = gaussian_noise(200000, 0.3, a);
  const MonoSignal y = gaussian_noise(200000, 0.3, b);
  CHECK(x.samples == y.samples);
  CHECK(std::abs(mean(x.samples)) < 0.003);
  CHECK(rms(x.samples) == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("diotic detection is bitwise") {
  StereoSignal s(10, 48000.0);
  CHECK(s.is_diotic());
  s.right[3] = 1e-300;
  CHECK_FALSE(s.is_diotic());
}

TEST_CASE("seed derivation separates paths") {
  CHECK(derive_seed(1, {0}) != derive_seed(1, {1}));
  CHECK(derive_seed(1, {0}) != derive_seed(2, {0}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(9, {4}) == derive_seed(9, {4}));
}

}
