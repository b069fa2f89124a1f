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

#ifndef REVCORR_CONFIG_H_
#define REVCORR_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "revcorr/experiment.h"
#include "revcorr/lasso.h"
#include "revcorr/listener.h"
#include "revcorr/noisegen.h"

namespace revcorr {

struct TemplateConfig {
  double snr_db = -6.0;
  int realizations = 100;
  bool subtract_noise = false;
  double bias_rate = 0.01;
  bool adapt_bias = true;
};

struct FitConfig {
  int folds = 10;
  int n_lambdas = 20;
  double lambda_min = 1.1e-3;
  double lambda_max = 0.1;
  double tolerance = 1e-6;
  int max_iterations = 10000;
  bool standardize = true;
  bool exclude_approach = true;
  bool balance = true;
};

// Everything a run depends on. Sub-seeds derive from `seed`.
struct PipelineConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "revcorr_out";
  int workers = 0;  // 0: REVCORR_WORKERS or hardware concurrency
  std::filesystem::path target_aba;
  std::filesystem::path target_ada;
  bool synthetic_targets = false;
  double target_level_db = 65.0;
  // Noise parameters shared by all conditions; the kind is set per block.
  NoiseSpec noise = NoiseSpec::Default(NoiseKind::kWhite);
  SessionConfig session;
  ModelConfig model;
  TemplateConfig templates;
  FitConfig fit;

  NoiseSpec NoiseFor(NoiseKind kind) const;
  CvOptions MakeCvOptions(std::uint64_t seed) const;
  int ResolvedWorkers() const;
};

// INI text with one section per component. Every field is written, so the
// text is a complete, canonical description of the configuration.
std::string ToIni(const PipelineConfig& config);
// Unknown keys are errors; missing keys keep their defaults.
PipelineConfig ParseIni(const std::string& text);
PipelineConfig LoadConfig(const std::filesystem::path& path);
// SHA-256 of ToIni(config) with the output directory and worker count
// reset to their defaults.
std::string ConfigHash(const PipelineConfig& config);

// Applies REVCORR_OUT_DIR and REVCORR_WORKERS when set.
void ApplyEnvironment(PipelineConfig& config);

}  // namespace revcorr

#endif  // REVCORR_CONFIG_H_
