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

// revcorr: simulate, fit and evaluate auditory classification images.
//
// Settings are resolved in this order, later ones winning: built-in
// defaults, --config file, REVCORR_OUT_DIR / REVCORR_WORKERS, flags.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "revcorr/config.h"
#include "revcorr/parallel.h"
#include "revcorr/pipeline.h"

namespace {

using revcorr::NoiseKind;

std::vector<NoiseKind> ParseKinds(const std::vector<std::string>& names) {
  std::vector<NoiseKind> kinds;
  for (const auto& n : names) kinds.push_back(revcorr::ParseNoiseKind(n));
  return kinds;
}

void PrintReport(const std::string& label, const revcorr::PredictionReport& r) {
  std::printf("%-24s %-15s n=%-5d dCVDt=%+.4f %s  PA=%.2f%% PAnull=%.2f%% dPA=%.2f%% (chance %.2f%%)\n",
              label.c_str(), r.incorrect_only ? "incorrect_only" : "all_trials", r.n_trials,
              r.delta_cvd_t, r.significant ? "significant" : "n.s.", r.pa, r.pa_null, r.delta_pa,
              r.chance_delta_pa);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverse-correlation toolkit for auditory classification images"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Configuration file (INI)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Run directory");
  app.add_option("--workers", workers, "Worker threads (0: automatic)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Master seed");

  // noisegen
  auto* noisegen = app.add_subcommand("noisegen", "Generate noise tokens and their manifest");
  std::string ng_kind = "white";
  revcorr::NoisegenOptions ng;
  noisegen->add_option("--kind", ng_kind, "white, bump or mps");
  noisegen->add_option("--count", ng.count, "Number of tokens")->check(CLI::PositiveNumber);
  noisegen->add_option("--first-index", ng.first_index, "Index of the first token");
  noisegen->add_flag("--dump-wav", ng.dump_wav, "Write each token as WAV");

  // validate-noise
  auto* validate = app.add_subcommand("validate-noise", "Compare noise statistics with reference values");
  std::vector<std::string> val_kinds = {"white", "bump", "mps"};
  int val_count = 1000;
  validate->add_option("--kinds", val_kinds, "Conditions to validate");
  validate->add_option("--count", val_count, "Tokens per condition")
      ->check(CLI::Range(static_cast<int>(revcorr::kMinValidationTokens), 1000000));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the artificial listener through the experiment");
  bool synthetic = false, dump_wav = false;
  std::string target_aba, target_ada;
  std::optional<int> blocks, trials;
  simulate->add_flag("--synthetic-targets", synthetic, "Use the bundled synthetic target pair");
  simulate->add_option("--target-aba", target_aba, "WAV file of the /aba/ target");
  simulate->add_option("--target-ada", target_ada, "WAV file of the /ada/ target");
  simulate->add_option("--blocks", blocks, "Number of blocks")->check(CLI::PositiveNumber);
  simulate->add_option("--trials", trials, "Trials per block")->check(CLI::PositiveNumber);
  simulate->add_flag("--dump-wav", dump_wav, "Write every noise token as WAV");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit one ACI per condition (exit 3 if any is null)");
  std::string trial_log, noise_manifest;
  std::vector<std::string> fit_kinds;
  fit->add_option("--trial-log", trial_log, "Trial log (default: <out>/trials.csv)");
  fit->add_option("--noise-manifest", noise_manifest, "Noise manifest (default: <out>/noise_manifest.csv)");
  fit->add_option("--condition", fit_kinds, "Conditions to fit (default: all in the log)");

  // predict
  auto* predict = app.add_subcommand("predict", "Evaluate an ACI on a fitted dataset");
  std::string pred_dataset = "white", pred_aci;
  predict->add_option("--dataset", pred_dataset, "Condition whose held-out folds are used");
  predict->add_option("--aci", pred_aci, "Condition whose ACI is evaluated (default: --dataset)");

  auto* crosspred = app.add_subcommand("crosspred", "Between-condition prediction matrices");
  auto* report = app.add_subcommand("report", "Write figure data CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    revcorr::PipelineConfig config;
    if (!config_path.empty()) config = revcorr::LoadConfig(config_path);
    revcorr::ApplyEnvironment(config);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (workers > 0) config.workers = workers;
    if (seed) {
      config.seed = *seed;
      config.session.master_seed = *seed;
    }
    revcorr::SetDefaultWorkers(config.ResolvedWorkers());

    if (*noisegen) {
      ng.kind = revcorr::ParseNoiseKind(ng_kind);
      const auto rows = revcorr::RunNoisegen(config, ng);
      std::printf("generated %zu %s tokens in %s\n", rows.size(), ng_kind.c_str(),
                  config.out_dir.string().c_str());
    } else if (*validate) {
      const auto kinds = ParseKinds(val_kinds);
      bool pass = true;
      for (const auto& res : revcorr::RunValidateNoise(config, kinds, val_count)) {
        for (const auto& c : res.report.checks) {
          std::printf("%-6s %-32s measured %8.2f expected %8.2f +- %.2f  %s\n",
                      revcorr::ToString(res.kind).c_str(), c.name.c_str(), c.measured, c.expected,
                      c.tolerance, c.pass ? "PASS" : "FAIL");
        }
        pass = pass && res.report.pass();
      }
      return pass ? revcorr::kExitOk : revcorr::kExitError;
    } else if (*simulate) {
      if (synthetic) config.synthetic_targets = true;
      if (!target_aba.empty()) config.target_aba = target_aba;
      if (!target_ada.empty()) config.target_ada = target_ada;
      if (blocks) config.session.n_blocks = *blocks;
      if (trials) config.session.trials_per_block = *trials;
      revcorr::SimulateOptions opt;
      opt.dump_wav = dump_wav;
      const auto summary = revcorr::RunSimulate(config, opt);
      for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::printf("simulated %zu trials in %zu blocks; logs in %s\n", summary.records.size(),
                  summary.blocks.size(), config.out_dir.string().c_str());
    } else if (*fit) {
      revcorr::FitCommandOptions opt;
      if (!trial_log.empty()) opt.trial_log = trial_log;
      if (!noise_manifest.empty()) opt.noise_manifest = noise_manifest;
      opt.kinds = ParseKinds(fit_kinds);
      const auto result = revcorr::RunFit(config, opt);
      for (const auto& a : result.fits) {
        const std::string label = revcorr::ToString(a.kind);
        for (const auto& w : a.fit.warnings) std::fprintf(stderr, "%s: %s\n", label.c_str(), w.c_str());
        std::printf("%s: lambda* %.4g, %s ACI\n", label.c_str(), a.fit.aci.lambda,
                    a.fit.aci.is_null ? "null" : "non-null");
        PrintReport(label, a.auto_all);
        PrintReport(label, a.auto_incorrect);
      }
      if (result.any_null) return revcorr::kExitNullAci;
    } else if (*predict) {
      revcorr::PredictCommandOptions opt;
      opt.dataset = revcorr::ParseNoiseKind(pred_dataset);
      if (!pred_aci.empty()) opt.aci = revcorr::ParseNoiseKind(pred_aci);
      const std::string label = (pred_aci.empty() ? pred_dataset : pred_aci) + " on " + pred_dataset;
      for (const auto& r : revcorr::RunPredict(config, opt)) PrintReport(label, r);
    } else if (*crosspred) {
      const auto matrices = revcorr::RunCrossPred(config);
      for (const auto& m : matrices) {
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
          for (std::size_t j = 0; j < m.labels.size(); ++j) {
            const auto& cell = m.cells[i][j];
            PrintReport(m.labels[j] + " on " + m.labels[i] + (cell.masked ? " [masked]" : ""),
                        cell.report);
          }
        }
      }
    } else if (*report) {
      const auto result = revcorr::RunReport(config);
      for (const auto& f : result.written) std::printf("wrote report/%s\n", f.c_str());
      for (const auto& m : result.missing) std::printf("missing: %s\n", m.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return revcorr::kExitError;
  }
  return revcorr::kExitOk;
}
