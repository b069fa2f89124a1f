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

#ifndef REVCORR_EXPERIMENT_H_
#define REVCORR_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "revcorr/noisegen.h"
#include "revcorr/signal.h"

namespace revcorr {

enum class Target { kAba, kAda };
enum class Phase { kApproach, kMeasure };
enum class Direction { kNone, kUp, kDown };

std::string ToString(Target t);
std::string ToString(Phase p);
Target ParseTarget(const std::string& s);
Phase ParsePhase(const std::string& s);

struct StaircaseParams {
  double initial_snr_db = 0.0;
  double down_step_db = 1.0;
  double up_down_ratio = 2.41;
};

// Weighted one-up one-down track (fixed steps, no halving).
struct StaircaseState {
  double current_snr_db = 0.0;
  double down_step_db = 1.0;
  double up_down_ratio = 2.41;
  int reversal_count = 0;
  Direction last_direction = Direction::kNone;
  int trial_index = 0;

  static StaircaseState Start(const StaircaseParams& params);
  double up_step_db() const { return up_down_ratio * down_step_db; }
};

// Correct -> SNR down by down_step; incorrect -> up by ratio * down_step.
// A change of direction counts as a reversal.
StaircaseState StaircaseUpdate(const StaircaseState& state, bool correct);

// Percent correct the weighted rule converges to: ratio / (1 + ratio).
double StaircaseEquilibrium(double up_down_ratio);

inline constexpr int kMeasuringPhaseReversal = 4;

struct TrialRecord {
  int trial_index = 0;
  int block_index = 0;
  NoiseKind noise_kind = NoiseKind::kWhite;
  std::uint64_t noise_seed = 0;
  Target target = Target::kAba;
  double snr_db = 0.0;
  double rove_db = 0.0;
  Target response = Target::kAba;
  bool correct = false;
  Phase phase = Phase::kApproach;
};

struct TargetPair {
  Waveform aba;
  Waveform ada;
  const Waveform& Get(Target t) const { return t == Target::kAba ? aba : ada; }
};

// What a listener sees in one trial. `mixture` is null when the listener
// declared that it does not need waveforms; `presented` and `snr_db` are
// only for idealised observers.
struct TrialStimulus {
  const Waveform* mixture = nullptr;
  Target presented = Target::kAba;
  double snr_db = 0.0;
};

class Listener {
 public:
  virtual ~Listener() = default;
  virtual bool NeedsWaveform() const { return true; }
  virtual void BeginBlock(int /*block_index*/) {}
  virtual Target Decide(const TrialStimulus& stimulus) = 0;
};

// Observer whose probability of a correct answer rises logistically from
// 50% to 100% with SNR.
class LogisticObserver : public Listener {
 public:
  LogisticObserver(double midpoint_db, double slope_db, std::uint64_t seed);
  bool NeedsWaveform() const override { return false; }
  Target Decide(const TrialStimulus& stimulus) override;
  double ProbabilityCorrect(double snr_db) const;

 private:
  double midpoint_db_;
  double slope_db_;
  Rng rng_;
};

class CoinFlipObserver : public Listener {
 public:
  explicit CoinFlipObserver(std::uint64_t seed) : rng_(seed) {}
  bool NeedsWaveform() const override { return false; }
  Target Decide(const TrialStimulus& stimulus) override;

 private:
  Rng rng_;
};

class AlwaysCorrectObserver : public Listener {
 public:
  bool NeedsWaveform() const override { return false; }
  Target Decide(const TrialStimulus& stimulus) override { return stimulus.presented; }
};

struct BlockSetup {
  int block_index = 0;
  NoiseSpec noise = NoiseSpec::Default(NoiseKind::kWhite);
  std::uint64_t master_seed = 1;
  // Index of this block's first noise within its condition; noise i of a
  // condition has seed DeriveSeed(master, "noise/<kind>", i).
  int first_noise_index = 0;
  int trials = 400;
  StaircaseParams staircase;
  bool rove = true;
  LevelConvention conv;
};

struct BlockResult {
  std::vector<TrialRecord> records;
  bool aborted = false;
  std::string error;
  int reversals = 0;
  // Response ratio outside [40%, 60%]; logged only.
  bool bias_warning = false;
};

using TrialCallback = std::function<void(const TrialRecord&, const Waveform& noise)>;

std::uint64_t NoiseSeed(std::uint64_t master, NoiseKind kind, int index);

// Runs one adaptive block. A listener exception aborts the block and the
// records collected so far are returned. `on_trial` (optional) sees each
// record together with its noise-alone waveform.
BlockResult RunBlock(const BlockSetup& setup, const TargetPair& targets,
                     Listener& listener, const TrialCallback& on_trial = {});

struct SessionConfig {
  int n_blocks = 30;
  int trials_per_block = 400;
  StaircaseParams staircase;
  std::uint64_t master_seed = 1;
  std::vector<NoiseKind> conditions = {NoiseKind::kWhite, NoiseKind::kBump,
                                       NoiseKind::kMps};
  bool rove = true;
};

// First blocks cover the conditions in permuted order; the remaining
// blocks are a shuffled, balanced assignment.
std::vector<NoiseKind> PlanBlocks(const SessionConfig& config);

struct ExclusionResult {
  std::vector<TrialRecord> records;
  bool block_excluded = false;
  std::string warning;
};

// Drops the approach phase of one block: every trial strictly before the
// trial at which the 4th reversal occurs. Reversals are recomputed from the
// correctness sequence.
ExclusionResult ExcludeApproachPhase(std::span<const TrialRecord> block);

// Removes majority-response trials from the extremes of their SNR-sorted
// list (maximum end first, then alternating) until the aba and ada
// response counts are equal. Original order is preserved.
std::vector<TrialRecord> BalanceResponses(std::span<const TrialRecord> records);

struct SdtResult {
  double dprime = 0.0;
  double criterion = 0.0;
};

// d' = z(hit) - z(fa), c = -(z(hit) + z(fa)) / 2.
SdtResult SignalDetection(double hit_rate, double false_alarm_rate);
// Clamps to [1/(2n), 1 - 1/(2n)].
double ClampRate(double rate, int n);

struct SnrBinMetrics {
  double snr_center_db = 0.0;
  int n_aba = 0;
  int n_ada = 0;
  double pc_aba = 0.0;
  double pc_ada = 0.0;
  double hit_rate = 0.0;
  double false_alarm_rate = 0.0;
  double dprime = 0.0;
  double criterion = 0.0;
};

struct BlockThreshold {
  int block_index = 0;
  NoiseKind noise_kind = NoiseKind::kWhite;
  double threshold_db = 0.0;
  double percent_correct = 0.0;
  int n_trials = 0;
};

struct BehavioralSummary {
  std::vector<SnrBinMetrics> bins;
  std::vector<BlockThreshold> thresholds;
  double percent_correct = 0.0;
};

// /ada/ is target-present: hit = P(ada | ada), fa = P(ada | aba). Bins are
// 1 dB wide, centred on integers; bins lacking either target are omitted.
// Thresholds are the mean SNR of measuring-phase trials per block.
BehavioralSummary BehavioralMetrics(std::span<const TrialRecord> records);

std::string TrialLogHeader();
std::string FormatTrialRecord(const TrialRecord& r);
void WriteTrialLog(const std::filesystem::path& path, std::span<const TrialRecord> records);
std::vector<TrialRecord> ReadTrialLog(const std::filesystem::path& path);

}  // namespace revcorr

#endif  // REVCORR_EXPERIMENT_H_
