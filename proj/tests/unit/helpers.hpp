// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace binharm::testing {

inline std::vector<double> cosine(double f, double fs, std::size_t n, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs + phase);
  return x;
}

// Amplitude of the f-Hz component in the second half of y (quadrature projection).
inline double tone_amplitude(std::span<const double> y, double f, double fs) {
  const std::size_t start = y.size() / 2;
  double c = 0.0, s = 0.0;
  for (std::size_t i = start; i < y.size(); ++i) {
    const double w = 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs;
    c += y[i] * std::cos(w);
    s += y[i] * std::sin(w);
  }
  const double n = static_cast<double>(y.size() - start);
  return 2.0 * std::hypot(c, s) / n;
}

// Steady-state gain of a real filter at f, measured by driving it with a cosine.
// Lengths are whole periods so the projection has no leakage.
inline double measured_gain(const std::function<std::vector<double>(std::span<const double>)>& filter, double f,
                            double fs, double seconds = 1.0) {
  const auto n = static_cast<std::size_t>(seconds * fs);
  const auto x = cosine(f, fs, n);
  const auto y = filter(x);
  return tone_amplitude(y, f, fs);
}

inline double db(double x) { return 20.0 * std::log10(x); }

inline double mean(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m += v;
  return m / static_cast<double>(x.size());
}

}  // namespace binharm::testing
