// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Recursive filters used by the stimulus and model stages. Every `process`
// call starts from zero state: one call filters one finite interval.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "binharm/signal.hpp"

namespace binharm {

// Glasberg & Moore equivalent rectangular bandwidth, in Hz.
double erb_hz(double freq_hz);

struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

// Digital Butterworth lowpass from the bilinear transform with pre-warped
// cutoff, realized as a cascade of second-order sections (plus one
// first-order section for odd orders, stored with b2 = a2 = 0).
class ButterworthLowpass {
 public:
  ButterworthLowpass(double cutoff_hz, int order, double sample_rate);

  std::vector<double> process(std::span<const double> x) const;
  std::complex<double> response(double freq_hz) const;

  double cutoff() const { return cutoff_; }
  int order() const { return order_; }
  const std::vector<Biquad>& sections() const { return sections_; }

 private:
  double cutoff_;
  int order_;
  double sample_rate_;
  std::vector<Biquad> sections_;
};

MonoSignal butterworth_lowpass(const MonoSignal& signal, double cutoff_hz, int order);

// Real-valued gammatone: `order` identical complex one-pole sections centered
// at fc, real part of the output, scaled to unit gain at fc. The pole radius
// is exp(-2 pi b / fs) with b = 1.019 * bandwidth, which makes the 4th-order
// filter's equivalent rectangular bandwidth equal `bandwidth`.
class Gammatone {
 public:
  Gammatone(double fc_hz, double bandwidth_hz, int order, double sample_rate);

  std::vector<double> process(std::span<const double> x) const;
  std::complex<double> response(double freq_hz) const;

  double center() const { return fc_; }

 private:
  std::complex<double> complex_response(double freq_hz) const;

  double fc_;
  int order_;
  double sample_rate_;
  std::complex<double> pole_;
  double gain_;  // per-section input gain
  double scale_; // output scale making |response(fc)| == 1
};

MonoSignal gammatone_bandpass(const MonoSignal& signal, double fc_hz, double bandwidth_hz,
                              int order = 4);

// First-order complex resonator (modulation filter). For a real input
// sinusoid of amplitude m at the center frequency the output magnitude
// settles to m.
class ModulationFilter {
 public:
  ModulationFilter(double center_hz, double q, double sample_rate);

  std::vector<std::complex<double>> process(std::span<const double> x) const;
  // Transfer function for a complex exponential input at `freq_hz` (may be negative).
  std::complex<double> response(double freq_hz) const;

  double center() const { return center_; }
  double q() const { return q_; }

 private:
  double center_;
  double q_;
  double sample_rate_;
  std::complex<double> pole_;
  double gain_;
};

}  // namespace binharm
