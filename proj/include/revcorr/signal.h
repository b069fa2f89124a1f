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

#ifndef REVCORR_SIGNAL_H_
#define REVCORR_SIGNAL_H_

#include <span>
#include <utility>
#include <vector>

#include "revcorr/rng.h"

namespace revcorr {

inline constexpr double kDefaultFs = 16000.0;
inline constexpr double kStimulusDuration = 0.86;
inline constexpr int kStimulusLength = 13760;

// A sampled mono signal. Amplitudes are dimensionless; their mapping to
// dB SPL is fixed by a LevelConvention.
struct Waveform {
  std::vector<double> samples;
  double fs = kDefaultFs;

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / fs; }
};

// Digital calibration: an RMS of 1.0 reads `dbspl_at_unit_rms` dB SPL.
struct LevelConvention {
  double dbspl_at_unit_rms = 100.0;
};

double Rms(std::span<const double> x);
double LevelDb(const Waveform& w, const LevelConvention& conv = {});
// RMS that corresponds to `level_db` under `conv`.
double RmsForLevel(double level_db, const LevelConvention& conv = {});

// Scales `w` so that it reads `target_db` dB SPL.
// Throws std::invalid_argument("silent waveform") for a zero-RMS input.
Waveform SetLevel(const Waveform& w, double target_db,
                  const LevelConvention& conv = {});

// Raised-cosine onset and offset ramps of `ramp_s` seconds each.
Waveform ApplyRamps(const Waveform& w, double ramp_s);

Waveform Scale(const Waveform& w, double gain);

// Signal-to-noise ratio in dB with an explicit minus-infinity state
// (noise alone), so that no IEEE infinity ever reaches a log file.
class Snr {
 public:
  static Snr Db(double db) { return Snr(db, false); }
  static Snr MinusInfinity() { return Snr(0.0, true); }

  bool is_minus_infinity() const { return minus_infinity_; }
  // Meaningless when is_minus_infinity().
  double db() const { return db_; }

 private:
  Snr(double db, bool minus_infinity) : db_(db), minus_infinity_(minus_infinity) {}
  double db_;
  bool minus_infinity_;
};

// Rescales `target` to LevelDb(noise) + snr and adds `noise`. The noise is
// taken as given (already at its nominal level).
Waveform MixAtSnr(const Waveform& target, const Waveform& noise, Snr snr,
                  const LevelConvention& conv = {});

inline constexpr double kRoveLimitDb = 2.5;

struct RovedWaveform {
  Waveform waveform;
  double rove_db = 0.0;
};

// Applies a gain drawn uniformly in [-2.5, +2.5] dB.
RovedWaveform RoveLevel(const Waveform& w, Rng& rng);
Waveform ApplyGainDb(const Waveform& w, double gain_db);

// |analytic signal|, computed with a full-length FFT.
std::vector<double> HilbertEnvelope(std::span<const double> x);

// Summary of the broadband envelope spectrum of a set of equal-length
// waveforms. Non-DC values are in dB re the (windowed) DC magnitude of each
// waveform; quantiles are taken across the set, per frequency bin.
struct EnvelopeSpectrumStats {
  std::vector<double> freqs_hz;
  std::vector<double> median_db;
  std::vector<double> p25_db;
  std::vector<double> p75_db;
  // Mean Hilbert envelope of each waveform expressed as a level, median
  // across the set.
  double dc_level_db = 0.0;

  // Median of `median_db` over bins with lo <= f <= hi.
  double MedianOver(double lo_hz, double hi_hz) const;
  // `median_db` linearly interpolated at f.
  double At(double f_hz) const;
};

EnvelopeSpectrumStats EnvelopeSpectrum(std::span<const Waveform> set,
                                       const LevelConvention& conv = {});

// Envelope spectrum of one waveform: dB re DC for bins 0..n/2 (bin 0 is
// 0 dB). Silent or flat envelopes give -inf in the non-DC bins.
std::vector<double> EnvelopeSpectrumDb(std::span<const double> x);

double Percentile(std::vector<double> values, double p);

}  // namespace revcorr

#endif  // REVCORR_SIGNAL_H_
