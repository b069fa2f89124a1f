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

// Run-directory orchestration behind the command-line subcommands.
//
// Layout of a run directory:
//   config.ini                 resolved configuration
//   trials.csv, blocks.csv     simulated trial log and per-block status
//   noise_manifest.csv         (kind, index, seed, spec id, rms) per token
//   fit/<kind>/                ACI, deviance path, fold models and metrics
//   predict/, crosspred/       prediction summaries and matrices
//   report/                    figure data
//   run_manifest.csv           checksums of everything above
//   timing.csv                 wall-clock per stage (not checksummed)

#ifndef REVCORR_PIPELINE_H_
#define REVCORR_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "revcorr/aci.h"
#include "revcorr/config.h"
#include "revcorr/experiment.h"
#include "revcorr/predict.h"
#include "revcorr/pyramid_basis.h"
#include "revcorr/targets.h"

namespace revcorr {

inline constexpr char kConfigName[] = "config.ini";
inline constexpr char kTrialLogName[] = "trials.csv";
inline constexpr char kBlockLogName[] = "blocks.csv";
inline constexpr char kNoiseManifestName[] = "noise_manifest.csv";

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNullAci = 3;

struct NoiseManifestRow {
  NoiseKind kind = NoiseKind::kWhite;
  int index = 0;
  std::uint64_t seed = 0;
  std::string spec_id;
  double rms = 0.0;
};

void WriteNoiseManifest(const std::filesystem::path& path,
                        std::span<const NoiseManifestRow> rows);
// Throws ManifestError naming every malformed row.
std::vector<NoiseManifestRow> ReadNoiseManifest(const std::filesystem::path& path);

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Targets from the configured WAV paths or the bundled synthetic pair.
// Throws with a message naming the flags to use when neither is set.
TargetPair ResolveTargets(const PipelineConfig& config);

// Appends "stage,seconds" lines to <dir>/timing.csv.
class StageTimer {
 public:
  StageTimer(std::filesystem::path dir, std::string stage);
  ~StageTimer();
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  std::filesystem::path dir_;
  std::string stage_;
  double start_ = 0.0;
};

// Rewrites <dir>/run_manifest.csv from the current directory contents.
void UpdateRunManifest(const std::filesystem::path& dir, const PipelineConfig& config);

struct NoisegenOptions {
  NoiseKind kind = NoiseKind::kWhite;
  int count = 10;
  int first_index = 0;
  bool dump_wav = false;
};

// Generates tokens of one condition into <out>/noise/ and appends them to
// the noise manifest.
std::vector<NoiseManifestRow> RunNoisegen(const PipelineConfig& config,
                                          const NoisegenOptions& options);

struct NoiseValidationResult {
  NoiseKind kind = NoiseKind::kWhite;
  ValidationReport report;
};

// Generates `count` fresh tokens per condition and compares their
// statistics with the reference values. Writes validation/<kind>.csv and
// validation/<kind>_envelope.csv.
std::vector<NoiseValidationResult> RunValidateNoise(const PipelineConfig& config,
                                                    std::span<const NoiseKind> kinds,
                                                    int count);

struct SimulateOptions {
  bool dump_wav = false;
};

struct SimulateSummary {
  std::vector<TrialRecord> records;
  std::vector<NoiseManifestRow> noise;
  std::vector<BlockResult> blocks;  // records moved into `records`
  std::vector<std::string> warnings;
};

// Runs the artificial listener through every planned block and writes the
// trial log, block log and noise manifest.
SimulateSummary RunSimulate(const PipelineConfig& config, const SimulateOptions& options = {});

// Trials of one condition ready for fitting.
struct PreparedData {
  NoiseKind kind = NoiseKind::kWhite;
  std::vector<TrialRecord> records;  // row order of `data`
  FitDataset data;
  std::vector<std::string> warnings;
};

// Per-block approach-phase exclusion and response balancing, as enabled
// in the fit config.
std::vector<TrialRecord> SelectFitTrials(std::span<const TrialRecord> log, NoiseKind kind,
                                         const FitConfig& fit,
                                         std::vector<std::string>* warnings = nullptr);

// Regenerates the noise of each record and checks it against the manifest
// (seed, spec id and rms must match). Throws ManifestError listing the
// offending trials.
FitDataset BuildDataset(const PipelineConfig& config, std::span<const TrialRecord> records,
                        std::span<const NoiseManifestRow> manifest);

PreparedData PrepareData(const PipelineConfig& config, std::span<const TrialRecord> log,
                         std::span<const NoiseManifestRow> manifest, NoiseKind kind);

// Fold seed of a condition's cross-validation.
std::uint64_t FitSeed(const PipelineConfig& config, NoiseKind kind);

struct FitArtifacts {
  NoiseKind kind = NoiseKind::kWhite;
  FitResult fit;
  // (block_index, trial_index) of each dataset row.
  std::vector<std::pair<int, int>> rows;
  PredictionReport auto_all;
  PredictionReport auto_incorrect;
};

std::filesystem::path FitDir(const std::filesystem::path& out_dir, NoiseKind kind);

// Writes every fit artifact for one condition; see FitDir.
void SaveFitArtifacts(const std::filesystem::path& dir, const FitArtifacts& a);
// Loads the ACI, fold models and row keys. Prediction reports are left
// empty.
FitArtifacts LoadFitArtifacts(const std::filesystem::path& dir, NoiseKind kind);

struct FitCommandOptions {
  std::optional<std::filesystem::path> trial_log;
  std::optional<std::filesystem::path> noise_manifest;
  std::vector<NoiseKind> kinds;  // empty: every condition in the log
};

struct FitCommandResult {
  std::vector<FitArtifacts> fits;
  bool any_null = false;
};

// Fits one ACI per condition. The manifest is fully validated before any
// artifact is written.
FitCommandResult RunFit(const PipelineConfig& config, const FitCommandOptions& options = {});

struct PredictCommandOptions {
  NoiseKind dataset = NoiseKind::kWhite;
  // ACI to evaluate; defaults to the dataset's own (auto-prediction).
  std::optional<NoiseKind> aci;
};

// Evaluates an ACI on a fitted dataset's held-out folds; writes
// predict/<aci>_on_<dataset>.csv with both trial variants.
std::vector<PredictionReport> RunPredict(const PipelineConfig& config,
                                         const PredictCommandOptions& options);

// Between-condition matrices for all fitted conditions, written to
// crosspred/all/ and crosspred/incorrect/ with a flat summary.
std::vector<CrossPredMatrix> RunCrossPred(const PipelineConfig& config);

struct ReportResult {
  std::vector<std::string> written;
  std::vector<std::string> missing;
};

// Figure data: per-block thresholds, per-SNR-bin behaviour, Delta metrics
// with 1.64 SEM error bars, ACI maps and cross-prediction matrices. Missing
// inputs are listed in report/missing.csv and the rest is still written.
ReportResult RunReport(const PipelineConfig& config);

// Mean and 1.64 SEM of `values`.
std::pair<double, double> MeanAndErrorBar(std::span<const double> values);

}  // namespace revcorr

#endif  // REVCORR_PIPELINE_H_
