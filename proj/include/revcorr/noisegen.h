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

#ifndef REVCORR_NOISEGEN_H_
#define REVCORR_NOISEGEN_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revcorr/signal.h"

namespace revcorr {

enum class NoiseKind { kWhite, kBump, kMps };

std::string ToString(NoiseKind kind);
// Accepts "white", "bump", "mps". Throws std::invalid_argument otherwise.
NoiseKind ParseNoiseKind(const std::string& name);

enum class BumpGainMode {
  kUniform,  // each bump's peak gain ~ U(0, max_gain_db)
  kFixed,    // every bump peaks at max_gain_db
};

struct BumpParams {
  int n_bumps = 30;
  double sigma_t_s = 0.02;
  double sigma_f_erb = 0.5;
  double max_gain_db = 10.0;
  double f_lo_hz = 80.0;
  double f_hi_hz = 7158.0;
  BumpGainMode gain_mode = BumpGainMode::kUniform;
};

enum class SpectralModUnit { kCyclesPerKhz, kCyclesPerHz };

struct MpsParams {
  // Infinite cut-offs make the mask all-pass.
  double temporal_cutoff_hz = 35.0;
  double spectral_cutoff = 8.0;
  SpectralModUnit spectral_unit = SpectralModUnit::kCyclesPerKhz;
  int phase_retrieval_iters = 100;
  double log_floor_db = -100.0;
  // Rescale the masked log-magnitude deviations to the pre-mask standard
  // deviation, so that the modulation depth survives the low-pass.
  bool preserve_modulation_depth = true;
  double momentum = 0.99;
  // Relative spectrogram error above which a token is flagged.
  double convergence_threshold = 0.10;
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kWhite;
  double fs = kDefaultFs;
  double duration_s = kStimulusDuration;
  double level_db = 65.0;
  double ramp_s = 0.075;
  BumpParams bump;
  MpsParams mps;
  // STFT geometry for bump and MPS synthesis.
  int stft_frame = 512;
  int stft_hop = 128;

  static NoiseSpec Default(NoiseKind kind);
  std::size_t length() const;
  // Stable textual identity used in manifests and hashes.
  std::string Id() const;
};

struct NoiseToken {
  Waveform waveform;
  std::uint64_t seed = 0;
  std::string spec_id;
  // Set when MPS phase retrieval ends above the error threshold.
  bool phase_retrieval_warning = false;
  double phase_retrieval_error = 0.0;
};

NoiseToken GenerateWhite(const NoiseSpec& spec, std::uint64_t seed);
NoiseToken GenerateBump(const NoiseSpec& spec, std::uint64_t seed);
NoiseToken GenerateMps(const NoiseSpec& spec, std::uint64_t seed);
// Dispatches on spec.kind.
NoiseToken GenerateNoise(const NoiseSpec& spec, std::uint64_t seed);

// Levels (dB SPL) in 1-ERB gammatone bands, evaluated from the power
// spectrum. `centers_erb` defaults to 3, 4, ..., 33 ERB_N.
std::vector<double> CriticalBandLevels(const Waveform& w,
                                       std::span<const double> centers_erb = {},
                                       const LevelConvention& conv = {});
std::vector<double> DefaultCriticalBandCenters();

// A target on the envelope spectrum: the median curve (dB re max) at a
// frequency, or its median over a frequency range.
struct EnvelopeTarget {
  std::string name;
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;  // equal to f_lo_hz for a point target
  double value_db = 0.0;
  double tolerance_db = 1.5;
};

// Reference statistics for one noise family, summarised over 1000 tokens.
struct NoiseReference {
  std::string name;
  std::vector<EnvelopeTarget> envelope;
  double band_lo_db = 0.0;
  double band_hi_db = 0.0;
  double band_tolerance_db = 1.5;
  double dc_db = 66.2;
  double dc_tolerance_db = 0.3;

  static NoiseReference For(NoiseKind kind);
};

struct ValidationCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::string reference;
  std::size_t n_tokens = 0;
  EnvelopeSpectrumStats envelope;
  std::vector<double> band_centers_hz;
  std::vector<double> band_median_db;
  std::vector<double> band_p25_db;
  std::vector<double> band_p75_db;
  std::vector<ValidationCheck> checks;

  bool pass() const;
};

inline constexpr std::size_t kMinValidationTokens = 100;
// Envelope-spectrum summaries ignore bins below this (window main lobe).
inline constexpr double kEnvelopeSummaryLowHz = 2.0;
inline constexpr double kEnvelopeSummaryHighHz = 60.0;

// Throws std::invalid_argument when fewer than kMinValidationTokens.
ValidationReport ValidateNoiseSet(std::span<const Waveform> tokens,
                                  const NoiseReference& reference,
                                  const LevelConvention& conv = {});

}  // namespace revcorr

#endif  // REVCORR_NOISEGEN_H_
