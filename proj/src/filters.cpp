// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/filters.hpp"

#include <cmath>
#include <numbers>

#include "binharm/errors.hpp"

namespace binharm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_frequency(double f, double sample_rate, const char* what) {
  if (!(f > 0.0) || !(f < sample_rate / 2.0))
    throw ValidationError(std::string(what) + " must lie in (0, sample_rate / 2)");
}

}  // namespace

double erb_hz(double freq_hz) { return 24.7 * (4.37 * freq_hz / 1000.0 + 1.0); }

ButterworthLowpass::ButterworthLowpass(double cutoff_hz, int order, double sample_rate)
    : cutoff_(cutoff_hz), order_(order), sample_rate_(sample_rate) {
  check_frequency(cutoff_hz, sample_rate, "cutoff");
  if (order < 1 || order > 16) throw ValidationError("butterworth order must be in [1, 16]");

  const double k = std::tan(kPi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  for (int i = 0; i < order / 2; ++i) {
    // Analog pole pair s^2 + q s + 1 with q = 2 sin(theta).
    const double theta = kPi * (2.0 * i + 1.0) / (2.0 * order);
    const double q = 2.0 * std::sin(theta);
    const double norm = 1.0 / (1.0 + q * k + k2);
    Biquad s;
    s.b0 = k2 * norm;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - q * k + k2) * norm;
    sections_.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s;
    s.b0 = k / (1.0 + k);
    s.b1 = s.b0;
    s.b2 = 0.0;
    s.a1 = (k - 1.0) / (k + 1.0);
    s.a2 = 0.0;
    sections_.push_back(s);
  }
}

std::vector<double> ButterworthLowpass::process(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (const Biquad& s : sections_) {
    double z1 = 0.0, z2 = 0.0;  // transposed direct form II
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

std::complex<double> ButterworthLowpass::response(double freq_hz) const {
  const std::complex<double> zi = std::polar(1.0, -2.0 * kPi * freq_hz / sample_rate_);
  std::complex<double> h = 1.0;
  for (const Biquad& s : sections_) {
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  return h;
}

MonoSignal butterworth_lowpass(const MonoSignal& signal, double cutoff_hz, int order) {
  ButterworthLowpass lp(cutoff_hz, order, signal.sample_rate);
  return MonoSignal(lp.process(signal.samples), signal.sample_rate);
}

Gammatone::Gammatone(double fc_hz, double bandwidth_hz, int order, double sample_rate)
    : fc_(fc_hz), order_(order), sample_rate_(sample_rate) {
  check_frequency(fc_hz, sample_rate, "gammatone center frequency");
  if (!(bandwidth_hz > 0.0)) throw ValidationError("gammatone bandwidth must be positive");
  if (order != 4) throw ValidationError("only 4th-order gammatone filters are supported");
  const double b = 1.019 * bandwidth_hz;
  const double radius = std::exp(-2.0 * kPi * b / sample_rate);
  pole_ = std::polar(radius, 2.0 * kPi * fc_hz / sample_rate);
  gain_ = 1.0 - radius;
  scale_ = 1.0;
  scale_ = 1.0 / std::abs(response(fc_hz));
}

std::complex<double> Gammatone::complex_response(double freq_hz) const {
  const std::complex<double> zi = std::polar(1.0, -2.0 * kPi * freq_hz / sample_rate_);
  return std::pow(gain_ / (1.0 - pole_ * zi), order_);
}

std::complex<double> Gammatone::response(double freq_hz) const {
  // Re{h} has transfer function (H(f) + conj(H(-f))) / 2; the factor 2 of the
  // unit-gain scaling is folded into scale_.
  return scale_ * (complex_response(freq_hz) + std::conj(complex_response(-freq_hz)));
}

std::vector<double> Gammatone::process(std::span<const double> x) const {
  // Hand-expanded complex arithmetic: this loop dominates model run time.
  const double pr = pole_.real(), pi = pole_.imag(), g = gain_;
  double re[4] = {0, 0, 0, 0}, im[4] = {0, 0, 0, 0};
  std::vector<double> y(x.size());
  const double out_scale = scale_ * 2.0 / g;
  for (std::size_t n = 0; n < x.size(); ++n) {
    double vr = g * x[n], vi = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double sr = vr + pr * re[k] - pi * im[k];
      const double si = vi + pr * im[k] + pi * re[k];
      re[k] = sr;
      im[k] = si;
      vr = g * sr;
      vi = g * si;
    }
    y[n] = out_scale * vr;
  }
  return y;
}

MonoSignal gammatone_bandpass(const MonoSignal& signal, double fc_hz, double bandwidth_hz,
                              int order) {
  Gammatone gt(fc_hz, bandwidth_hz, order, signal.sample_rate);
  return MonoSignal(gt.process(signal.samples), signal.sample_rate);
}

ModulationFilter::ModulationFilter(double center_hz, double q, double sample_rate)
    : center_(center_hz), q_(q), sample_rate_(sample_rate) {
  check_frequency(center_hz, sample_rate, "modulation filter frequency");
  if (!(q > 0.0)) throw ValidationError("modulation filter Q must be positive");
  const double w0 = 2.0 * kPi * center_hz / sample_rate;
  const double e0 = std::exp(-w0 / (2.0 * q));
  pole_ = std::polar(e0, w0);
  gain_ = 1.0 - e0;
}

std::complex<double> ModulationFilter::response(double freq_hz) const {
  const std::complex<double> zi = std::polar(1.0, -2.0 * kPi * freq_hz / sample_rate_);
  return gain_ / (1.0 - pole_ * zi);
}

std::vector<std::complex<double>> ModulationFilter::process(std::span<const double> x) const {
  const double pr = pole_.real(), pi = pole_.imag();
  std::vector<std::complex<double>> y(x.size());
  double sr = 0.0, si = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double nr = gain_ * x[n] + pr * sr - pi * si;
    si = pr * si + pi * sr;
    sr = nr;
    // A real cosine splits its amplitude over +/- f; doubling restores it.
    y[n] = {2.0 * sr, 2.0 * si};
  }
  return y;
}

}  // namespace binharm
