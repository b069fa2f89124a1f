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

#include "revcorr/targets.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "revcorr/rng.h"
#include "revcorr/wav.h"

namespace revcorr {
namespace {

constexpr double kPi = std::numbers::pi;

// Two-pole resonator with unit DC gain whose frequency may change every
// sample.
class Formant {
 public:
  double Step(double x, double f_hz, double bw_hz, double fs) {
    const double r = std::exp(-kPi * bw_hz / fs);
    const double a1 = 2.0 * r * std::cos(2.0 * kPi * f_hz / fs);
    const double a2 = -r * r;
    const double y = (1.0 - a1 - a2) * x + a1 * y1_ + a2 * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double y1_ = 0.0, y2_ = 0.0;
};

double Smoothstep(double t0, double t1, double t) {
  if (t <= t0) return 0.0;
  if (t >= t1) return 1.0;
  const double u = (t - t0) / (t1 - t0);
  return u * u * (3.0 - 2.0 * u);
}

double Lerp(double a, double b, double u) { return a + (b - a) * u; }

}  // namespace

Waveform SynthesizeVcv(const VcvParams& p, const LevelConvention& conv) {
  const std::size_t n = static_cast<std::size_t>(std::lround(p.duration_s * p.fs));
  // Timeline (s): vowel 1, closure, burst, vowel 2.
  const double v1_on = 0.10, v1_off = 0.34, burst = 0.43, v2_on = 0.44, v2_off = 0.74;
  const double transition = 0.06;
  const double f1 = 700.0, f2 = 1220.0, f3 = 2600.0, f4 = 3500.0;
  const double f1_closed = 300.0, f3_closed = 2400.0;

  Waveform w{std::vector<double>(n, 0.0), p.fs};
  Formant r1, r2, r3, r4, burst_filter;
  Rng rng(DeriveSeed(0x5eed, "vcv-aspiration"));
  std::normal_distribution<double> gauss;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.fs;
    const double f0 = Lerp(130.0, 105.0, t / p.duration_s);
    phase += f0 / p.fs;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    const double voicing =
        Smoothstep(v1_on - 0.03, v1_on, t) * (1.0 - Smoothstep(v1_off - 0.03, v1_off, t)) +
        Smoothstep(v2_on, v2_on + 0.02, t) * (1.0 - Smoothstep(v2_off - 0.04, v2_off, t));
    const double source = voicing * pulse + 0.02 * voicing * gauss(rng);

    // Formants move towards the consonant locus around the closure.
    const double into = Smoothstep(v1_off - transition, v1_off, t);
    const double out = Smoothstep(v2_on, v2_on + transition, t);
    const double closing = t < burst ? into : 1.0 - out;
    const double f2_locus = t < burst ? Lerp(f2, p.f2_onset_hz, 0.8) : p.f2_onset_hz;
    const double F1 = Lerp(f1, f1_closed, closing);
    const double F2 = Lerp(f2, f2_locus, closing);
    const double F3 = Lerp(f3, f3_closed, closing);

    double y = source;
    y = r1.Step(y, F1, 90.0, p.fs);
    y = r2.Step(y, F2, 110.0, p.fs);
    y = r3.Step(y, F3, 160.0, p.fs);
    y = r4.Step(y, f4, 250.0, p.fs);

    const double burst_env = std::exp(-std::max(0.0, t - burst) / 0.004) * (t >= burst ? 1.0 : 0.0);
    const double b = burst_filter.Step(gauss(rng) * burst_env, p.burst_hz, 0.6 * p.burst_hz, p.fs);
    w.samples[i] = y + 0.3 * b;
  }
  return ApplyRamps(SetLevel(w, p.level_db, conv), 0.01);
}

TargetPair SyntheticTargets(const LevelConvention& conv) {
  VcvParams aba;
  aba.f2_onset_hz = kAbaF2OnsetHz;
  aba.burst_hz = 1200.0;
  VcvParams ada;
  ada.f2_onset_hz = kAdaF2OnsetHz;
  ada.burst_hz = 3500.0;
  return {SynthesizeVcv(aba, conv), SynthesizeVcv(ada, conv)};
}

TargetPair LoadTargets(const std::filesystem::path& aba, const std::filesystem::path& ada,
                       double level_db, double fs, std::size_t length,
                       const LevelConvention& conv) {
  auto load = [&](const std::filesystem::path& path) {
    Waveform w = ReadWav(path);
    if (w.fs != fs) {
      throw std::invalid_argument(path.string() + ": sample rate " + std::to_string(w.fs) +
                                  " differs from " + std::to_string(fs));
    }
    if (w.samples.size() != length) {
      throw std::invalid_argument(path.string() + ": " + std::to_string(w.samples.size()) +
                                  " samples, expected " + std::to_string(length));
    }
    return SetLevel(w, level_db, conv);
  };
  return {load(aba), load(ada)};
}

}  // namespace revcorr
