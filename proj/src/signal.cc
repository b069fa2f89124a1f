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

#include "revcorr/signal.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "revcorr/fft.h"

namespace revcorr {

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double LevelDb(const Waveform& w, const LevelConvention& conv) {
  return conv.dbspl_at_unit_rms + 20.0 * std::log10(Rms(w.samples));
}

double RmsForLevel(double level_db, const LevelConvention& conv) {
  return std::pow(10.0, (level_db - conv.dbspl_at_unit_rms) / 20.0);
}

Waveform Scale(const Waveform& w, double gain) {
  Waveform out = w;
  for (double& v : out.samples) v *= gain;
  return out;
}

Waveform SetLevel(const Waveform& w, double target_db,
                  const LevelConvention& conv) {
  const double rms = Rms(w.samples);
  if (!(rms > 0.0)) throw std::invalid_argument("silent waveform");
  return Scale(w, RmsForLevel(target_db, conv) / rms);
}

Waveform ApplyRamps(const Waveform& w, double ramp_s) {
  if (ramp_s < 0.0) throw std::invalid_argument("negative ramp duration");
  const auto n = static_cast<std::size_t>(std::lround(ramp_s * w.fs));
  if (2 * n > w.size()) {
    throw std::invalid_argument("ramps longer than the waveform");
  }
  Waveform out = w;
  for (std::size_t i = 0; i < n; ++i) {
    // Sample i sits at phase i / n; the ramp midpoint (i = n / 2) is 0.5.
    const double g =
        0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) /
                             static_cast<double>(n));
    out.samples[i] *= g;
    out.samples[w.size() - 1 - i] *= g;
  }
  return out;
}

Waveform MixAtSnr(const Waveform& target, const Waveform& noise, Snr snr,
                  const LevelConvention& conv) {
  if (target.size() != noise.size() || target.fs != noise.fs) {
    throw std::invalid_argument("target and noise differ in length or fs");
  }
  if (snr.is_minus_infinity()) return noise;
  Waveform out = SetLevel(target, LevelDb(noise, conv) + snr.db(), conv);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i] += noise.samples[i];
  }
  return out;
}

Waveform ApplyGainDb(const Waveform& w, double gain_db) {
  return Scale(w, std::pow(10.0, gain_db / 20.0));
}

RovedWaveform RoveLevel(const Waveform& w, Rng& rng) {
  const double rove = Uniform(rng, -kRoveLimitDb, kRoveLimitDb);
  return {ApplyGainDb(w, rove), rove};
}

std::vector<double> HilbertEnvelope(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> spec = Fft(in);
  // Analytic signal: keep DC (and Nyquist), double positive frequencies.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) {
      spec[k] *= 2.0;
    } else if (!(n % 2 == 0 && k == half)) {
      spec[k] = 0.0;
    }
  }
  std::vector<Complex> analytic = InverseFft(spec);
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
  return env;
}

std::vector<double> EnvelopeSpectrumDb(std::span<const double> x) {
  const std::vector<double> env = HilbertEnvelope(x);
  const std::size_t n = env.size();
  double mean = 0.0;
  for (double v : env) mean += v;
  mean /= static_cast<double>(n);

  // The fluctuation part is Hann-windowed so that the deterministic ramp
  // dips at both ends do not leak into the low modulation bins.
  std::vector<double> fluct(n);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                          static_cast<double>(i) /
                                          static_cast<double>(n));
    window_sum += w;
    fluct[i] = (env[i] - mean) * w;
  }
  const std::vector<Complex> spec = RealFft(fluct);
  const double dc = mean * window_sum;
  std::vector<double> out(spec.size());
  out[0] = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double mag = std::abs(spec[k]);
    out[k] = (dc > 0.0 && mag > 1e-12 * dc)
                 ? 20.0 * std::log10(mag / dc)
                 : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  // -inf - -inf would be NaN.
  if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

EnvelopeSpectrumStats EnvelopeSpectrum(std::span<const Waveform> set,
                                       const LevelConvention& conv) {
  if (set.size() < 2) {
    throw std::invalid_argument("envelope spectrum needs at least 2 waveforms");
  }
  const std::size_t n = set[0].size();
  for (const Waveform& w : set) {
    if (w.size() != n) throw std::invalid_argument("unequal waveform lengths");
  }
  const std::size_t bins = n / 2 + 1;
  std::vector<std::vector<double>> per_bin(bins);
  std::vector<double> dc_levels;
  for (const Waveform& w : set) {
    const std::vector<double> spec = EnvelopeSpectrumDb(w.samples);
    for (std::size_t k = 0; k < bins; ++k) per_bin[k].push_back(spec[k]);
    const std::vector<double> env = HilbertEnvelope(w.samples);
    double mean = 0.0;
    for (double v : env) mean += v;
    mean /= static_cast<double>(n);
    dc_levels.push_back(conv.dbspl_at_unit_rms + 20.0 * std::log10(mean));
  }
  EnvelopeSpectrumStats stats;
  stats.freqs_hz.resize(bins);
  stats.median_db.resize(bins);
  stats.p25_db.resize(bins);
  stats.p75_db.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    stats.freqs_hz[k] = static_cast<double>(k) * set[0].fs / static_cast<double>(n);
    stats.median_db[k] = Percentile(per_bin[k], 50.0);
    stats.p25_db[k] = Percentile(per_bin[k], 25.0);
    stats.p75_db[k] = Percentile(per_bin[k], 75.0);
  }
  stats.dc_level_db = Percentile(dc_levels, 50.0);
  return stats;
}

double EnvelopeSpectrumStats::MedianOver(double lo_hz, double hi_hz) const {
  std::vector<double> sel;
  for (std::size_t k = 0; k < freqs_hz.size(); ++k) {
    if (freqs_hz[k] >= lo_hz && freqs_hz[k] <= hi_hz) sel.push_back(median_db[k]);
  }
  if (sel.empty()) throw std::invalid_argument("no bins in frequency range");
  return Percentile(sel, 50.0);
}

double EnvelopeSpectrumStats::At(double f_hz) const {
  if (freqs_hz.size() < 2) throw std::logic_error("empty spectrum");
  const double df = freqs_hz[1] - freqs_hz[0];
  const double pos = f_hz / df;
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= freqs_hz.size()) return median_db.back();
  const double frac = pos - static_cast<double>(k);
  return median_db[k] + frac * (median_db[k + 1] - median_db[k]);
}

}  // namespace revcorr
