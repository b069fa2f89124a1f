// Copyright 2026 The revcorr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVCORR_FILTERS_H_
#define REVCORR_FILTERS_H_

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace revcorr {

// One second-order section, a0 = 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Cascade of biquads (transposed direct form II).
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections);

  void Reset();
  void ProcessInPlace(std::span<double> x);
  std::vector<double> Process(std::span<const double> x);
  // Magnitude response at f (Hz) for sample rate fs.
  double Magnitude(double f_hz, double fs) const;

  const std::vector<Biquad>& sections() const { return sections_; }

 private:
  std::vector<Biquad> sections_;
  std::vector<double> z1_, z2_;
};

// Digital Butterworth low-pass of the given order (bilinear transform with
// pre-warping), unit gain at DC.
SosFilter ButterworthLowpass(int order, double cutoff_hz, double fs);

// Fourth-order all-pole gammatone filter, realised as a cascade of four
// complex one-pole sections with pole radius exp(-2 pi b / fs), b = 1.019
// ERB(fc). The real output has unit gain at fc.
class GammatoneFilter {
 public:
  GammatoneFilter(double center_hz, double fs, double bandwidth_erb = 1.0);

  // Real part of the (stateless per call) filtered signal.
  std::vector<double> Process(std::span<const double> x) const;

  double center_hz() const { return center_hz_; }
  // Magnitude response of the real output at f.
  double Magnitude(double f_hz) const;

 private:
  double center_hz_;
  double fs_;
  std::complex<double> pole_;
  double gain_;
};

// Complex one-pole resonator with quality factor q; real output, unit gain
// at fc. Used for the modulation filterbank.
class ResonatorFilter {
 public:
  ResonatorFilter(double center_hz, double q, double fs);
  std::vector<double> Process(std::span<const double> x) const;
  // Magnitude of the complex output scaled by 1/sqrt(2): a phase-insensitive
  // version with the same RMS as Process() for a sinusoid at fc.
  std::vector<double> ProcessMagnitude(std::span<const double> x) const;

 private:
  std::complex<double> pole_;
  double gain_;
};

// Linear-phase FIR design by frequency sampling: `magnitude(f)` is sampled
// on an FFT grid, made zero-phase, shifted and Hann-windowed. `taps` must
// be even or odd; the delay is (taps - 1) / 2 samples.
std::vector<double> DesignLinearPhaseFir(int taps, double fs,
                                         const std::function<double(double)>& magnitude);

// Convolves x with h and removes the (taps - 1) / 2 delay of a linear-phase
// filter, returning a signal of the same length as x.
std::vector<double> FilterLinearPhase(std::span<const double> x,
                                      std::span<const double> h);

}  // namespace revcorr

#endif  // REVCORR_FILTERS_H_
