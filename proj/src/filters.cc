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

#include "revcorr/filters.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "revcorr/erb.h"
#include "revcorr/fft.h"

namespace revcorr {

using std::numbers::pi;

SosFilter::SosFilter(std::vector<Biquad> sections)
    : sections_(std::move(sections)),
      z1_(sections_.size(), 0.0),
      z2_(sections_.size(), 0.0) {}

void SosFilter::Reset() {
  std::fill(z1_.begin(), z1_.end(), 0.0);
  std::fill(z2_.begin(), z2_.end(), 0.0);
}

void SosFilter::ProcessInPlace(std::span<double> x) {
  for (std::size_t s = 0; s < sections_.size(); ++s) {
    const Biquad& q = sections_[s];
    double z1 = z1_[s], z2 = z2_[s];
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
    z1_[s] = z1;
    z2_[s] = z2;
  }
}

std::vector<double> SosFilter::Process(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  ProcessInPlace(out);
  return out;
}

double SosFilter::Magnitude(double f_hz, double fs) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * pi * f_hz / fs);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const Biquad& q : sections_) {
    h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
  }
  return std::abs(h);
}

SosFilter ButterworthLowpass(int order, double cutoff_hz, double fs) {
  if (order < 1) throw std::invalid_argument("filter order must be >= 1");
  if (!(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0)) {
    throw std::invalid_argument("cutoff outside (0, fs/2)");
  }
  const double warped = 2.0 * fs * std::tan(pi * cutoff_hz / fs);
  std::vector<Biquad> sections;
  auto bilinear = [fs](std::complex<double> s) {
    return (1.0 + s / (2.0 * fs)) / (1.0 - s / (2.0 * fs));
  };
  // Poles in the upper half plane; each pairs with its conjugate.
  for (int k = 0; k < order / 2; ++k) {
    const double theta = pi * (2.0 * k + order + 1.0) / (2.0 * order);
    const std::complex<double> z = bilinear(warped * std::polar(1.0, theta));
    Biquad q;
    q.a1 = -2.0 * z.real();
    q.a2 = std::norm(z);
    const double g = (1.0 + q.a1 + q.a2) / 4.0;
    q.b0 = g;
    q.b1 = 2.0 * g;
    q.b2 = g;
    sections.push_back(q);
  }
  if (order % 2 == 1) {
    const double z = bilinear(std::complex<double>(-warped, 0.0)).real();
    Biquad q;
    q.a1 = -z;
    const double g = (1.0 - z) / 2.0;
    q.b0 = g;
    q.b1 = g;
    sections.push_back(q);
  }
  return SosFilter(std::move(sections));
}

GammatoneFilter::GammatoneFilter(double center_hz, double fs, double bandwidth_erb)
    : center_hz_(center_hz), fs_(fs) {
  const double b = 1.019 * bandwidth_erb * ErbBandwidth(center_hz);
  const double r = std::exp(-2.0 * pi * b / fs);
  pole_ = std::polar(r, 2.0 * pi * center_hz / fs);
  // |H(fc)| of the complex cascade is 1 / (1 - r)^4; the factor 2 restores
  // the amplitude when only the real part is kept.
  gain_ = 2.0 * std::pow(1.0 - r, 4);
}

std::vector<double> GammatoneFilter::Process(std::span<const double> x) const {
  std::complex<double> s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  const std::complex<double> a = pole_;
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    s1 = x[n] + a * s1;
    s2 = s1 + a * s2;
    s3 = s2 + a * s3;
    s4 = s3 + a * s4;
    out[n] = gain_ * s4.real();
  }
  return out;
}

double GammatoneFilter::Magnitude(double f_hz) const {
  const std::complex<double> zi = std::polar(1.0, -2.0 * pi * f_hz / fs_);
  const std::complex<double> h1 = 1.0 / std::pow(1.0 - pole_ * zi, 4);
  const std::complex<double> h2 = 1.0 / std::pow(1.0 - std::conj(pole_) * zi, 4);
  return std::abs(0.5 * gain_ * (h1 + h2));
}

ResonatorFilter::ResonatorFilter(double center_hz, double q, double fs) {
  const double bandwidth = center_hz / q;
  const double r = std::exp(-pi * bandwidth / fs);
  pole_ = std::polar(r, 2.0 * pi * center_hz / fs);
  gain_ = 2.0 * (1.0 - r);
}

std::vector<double> ResonatorFilter::Process(std::span<const double> x) const {
  std::complex<double> s = 0.0;
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    s = x[n] + pole_ * s;
    out[n] = gain_ * s.real();
  }
  return out;
}

std::vector<double> ResonatorFilter::ProcessMagnitude(std::span<const double> x) const {
  std::complex<double> s = 0.0;
  std::vector<double> out(x.size());
  const double g = gain_ / std::sqrt(2.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    s = x[n] + pole_ * s;
    out[n] = g * std::abs(s);
  }
  return out;
}

std::vector<double> DesignLinearPhaseFir(int taps, double fs,
                                         const std::function<double(double)>& magnitude) {
  if (taps < 3) throw std::invalid_argument("FIR needs at least 3 taps");
  // Real, even magnitude sampled on a dense grid; the impulse response is
  // its inverse DFT evaluated at t = i - (taps - 1) / 2, which also covers
  // the half-sample centre of even tap counts.
  std::size_t grid = 1;
  while (grid < 4 * static_cast<std::size_t>(taps)) grid <<= 1;
  std::vector<double> mag(grid / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    mag[k] = magnitude(static_cast<double>(k) * fs / static_cast<double>(grid));
  }
  std::vector<double> h(taps);
  const double center = (taps - 1) / 2.0;
  for (int i = 0; i < taps; ++i) {
    const double t = i - center;
    double v = mag[0] + mag.back() * std::cos(pi * t);
    for (std::size_t k = 1; k + 1 < mag.size(); ++k) {
      v += 2.0 * mag[k] * std::cos(2.0 * pi * static_cast<double>(k) * t /
                                   static_cast<double>(grid));
    }
    const double w = 0.5 - 0.5 * std::cos(2.0 * pi * (i + 0.5) / taps);
    h[i] = v / static_cast<double>(grid) * w;
  }
  return h;
}

std::vector<double> FilterLinearPhase(std::span<const double> x,
                                      std::span<const double> h) {
  const std::size_t n = x.size();
  const std::size_t m = h.size();
  std::size_t size = 1;
  while (size < n + m - 1) size <<= 1;
  std::vector<double> xp(size, 0.0), hp(size, 0.0);
  std::copy(x.begin(), x.end(), xp.begin());
  std::copy(h.begin(), h.end(), hp.begin());
  std::vector<Complex> xs = RealFft(xp);
  const std::vector<Complex> hs = RealFft(hp);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  const std::vector<double> y = InverseRealFft(xs, size);
  const std::size_t delay = (m - 1) / 2;
  return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(delay),
                             y.begin() + static_cast<std::ptrdiff_t>(delay + n));
}

}  // namespace revcorr
