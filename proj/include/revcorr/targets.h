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

#ifndef REVCORR_TARGETS_H_
#define REVCORR_TARGETS_H_

#include <filesystem>

#include "revcorr/experiment.h"
#include "revcorr/signal.h"

namespace revcorr {

inline constexpr double kAbaF2OnsetHz = 1298.0;
inline constexpr double kAdaF2OnsetHz = 1722.0;
inline constexpr double kTargetLevelDb = 65.0;

struct VcvParams {
  double f2_onset_hz = kAbaF2OnsetHz;
  // Centre of the release burst.
  double burst_hz = 1500.0;
  double fs = kDefaultFs;
  double duration_s = kStimulusDuration;
  double level_db = kTargetLevelDb;
};

// Formant-synthesised vowel-consonant-vowel: /a/, a closure, a release
// burst and a second /a/ whose F2 glides from f2_onset_hz to the vowel
// target. Deterministic; a test fixture rather than a speech replica.
Waveform SynthesizeVcv(const VcvParams& params, const LevelConvention& conv = {});

// The bundled /aba/ and /ada/ pair (F2 onsets 1298 and 1722 Hz).
TargetPair SyntheticTargets(const LevelConvention& conv = {});

// Reads two WAV files, checks that they share the expected sample rate and
// length, and sets both to the target level.
TargetPair LoadTargets(const std::filesystem::path& aba, const std::filesystem::path& ada,
                       double level_db = kTargetLevelDb, double fs = kDefaultFs,
                       std::size_t length = kStimulusLength, const LevelConvention& conv = {});

}  // namespace revcorr

#endif  // REVCORR_TARGETS_H_
