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

#include "revcorr/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "revcorr/listener.h"
#include "revcorr/manifest.h"
#include "revcorr/noisegen.h"
#include "revcorr/parallel.h"
#include "revcorr/rng.h"
#include "revcorr/tf_rep.h"
#include "revcorr/wav.h"

namespace revcorr {
namespace fs = std::filesystem;

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

double NowSeconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string NoiseManifestHeader() { return "noise_kind,noise_index,seed,spec_id,rms"; }

std::string JoinErrors(const std::vector<std::string>& errors, std::size_t limit = 20) {
  std::string msg;
  for (std::size_t i = 0; i < errors.size() && i < limit; ++i) msg += "\n  " + errors[i];
  if (errors.size() > limit) {
    msg += "\n  ... " + std::to_string(errors.size() - limit) + " more";
  }
  return msg;
}

// Stored without the run-local output directory and worker count so that
// reruns elsewhere produce the same bytes.
void WriteConfig(const PipelineConfig& config) {
  fs::create_directories(config.out_dir);
  PipelineConfig portable = config;
  portable.out_dir = PipelineConfig{}.out_dir;
  portable.workers = 0;
  WriteFileAtomic(config.out_dir / kConfigName, ToIni(portable));
}

std::vector<TrialRecord> OfKind(std::span<const TrialRecord> log, NoiseKind kind) {
  std::vector<TrialRecord> out;
  for (const auto& r : log) {
    if (r.noise_kind == kind) out.push_back(r);
  }
  return out;
}

std::vector<NoiseKind> KindsInLog(std::span<const TrialRecord> log) {
  std::set<NoiseKind> kinds;
  for (const auto& r : log) kinds.insert(r.noise_kind);
  return {kinds.begin(), kinds.end()};
}

std::vector<NoiseKind> FittedKinds(const fs::path& out_dir) {
  std::vector<NoiseKind> kinds;
  for (NoiseKind k : {NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps}) {
    if (fs::exists(FitDir(out_dir, k) / "aci.meta.csv")) kinds.push_back(k);
  }
  return kinds;
}

std::string PredictionCsv(const std::string& label, const PredictionReport& all,
                          const PredictionReport& inc) {
  return SummaryHeader() + "\n" + SummaryRow(label, all) + "\n" + SummaryRow(label, inc) + "\n";
}

std::string FoldMetricsCsv(const PredictionReport& all, const PredictionReport& inc) {
  std::string text = "variant,fold,delta_cvd_t,delta_pa\n";
  for (const PredictionReport* r : {&all, &inc}) {
    const std::string variant = r->incorrect_only ? "incorrect_only" : "all_trials";
    for (std::size_t f = 0; f < r->fold_delta_cvd_t.size(); ++f) {
      text += variant + "," + std::to_string(f) + "," + Num(r->fold_delta_cvd_t[f]) + "," +
              Num(r->fold_delta_pa[f]) + "\n";
    }
  }
  return text;
}

// Loads the log and manifest of a run and rebuilds one condition's
// dataset in the row order stored with its fit.
struct LoadedFit {
  FitArtifacts artifacts;
  FitDataset data;
};

LoadedFit LoadFitWithData(const PipelineConfig& config, NoiseKind kind,
                          std::span<const TrialRecord> log,
                          std::span<const NoiseManifestRow> manifest) {
  LoadedFit out;
  out.artifacts = LoadFitArtifacts(FitDir(config.out_dir, kind), kind);
  std::map<std::pair<int, int>, const TrialRecord*> by_key;
  for (const auto& r : log) by_key[{r.block_index, r.trial_index}] = &r;
  std::vector<TrialRecord> rows;
  rows.reserve(out.artifacts.rows.size());
  for (const auto& key : out.artifacts.rows) {
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw ManifestError("fit row (block " + std::to_string(key.first) + ", trial " +
                          std::to_string(key.second) + ") is missing from the trial log");
    }
    rows.push_back(*it->second);
  }
  out.data = BuildDataset(config, rows, manifest);
  return out;
}

}  // namespace

void WriteNoiseManifest(const fs::path& path, std::span<const NoiseManifestRow> rows) {
  std::string text;
  std::set<std::pair<NoiseKind, std::string>> specs;
  for (const auto& r : rows) specs.insert({r.kind, r.spec_id});
  for (const auto& [kind, id] : specs) text += "# spec " + ToString(kind) + " " + id + "\n";
  text += NoiseManifestHeader() + "\n";
  for (const auto& r : rows) {
    text += ToString(r.kind) + "," + std::to_string(r.index) + "," + std::to_string(r.seed) + "," +
            r.spec_id + "," + Num(r.rms) + "\n";
  }
  WriteFileAtomic(path, text);
}

std::vector<NoiseManifestRow> ReadNoiseManifest(const fs::path& path) {
  if (!fs::exists(path)) throw ManifestError("noise manifest not found: " + path.string());
  const auto lines = Lines(ReadFile(path));
  std::vector<NoiseManifestRow> rows;
  std::vector<std::string> errors;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != NoiseManifestHeader()) {
        throw ManifestError(path.string() + ": unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = SplitCsv(line);
    try {
      if (f.size() != 5) throw std::invalid_argument("expected 5 fields");
      NoiseManifestRow r;
      r.kind = ParseNoiseKind(f[0]);
      std::size_t used = 0;
      r.index = std::stoi(f[1], &used);
      if (used != f[1].size() || r.index < 0) throw std::invalid_argument("bad index");
      r.seed = std::stoull(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("bad seed");
      r.spec_id = f[3];
      r.rms = ParseNumber(f[4]);
      rows.push_back(r);
    } catch (const std::exception& e) {
      errors.push_back("line " + std::to_string(i + 1) + ": " + e.what() + ": '" + line + "'");
    }
  }
  if (!header_seen) throw ManifestError(path.string() + ": missing header");
  if (!errors.empty()) {
    throw ManifestError(path.string() + ": " + std::to_string(errors.size()) +
                        " malformed row(s):" + JoinErrors(errors));
  }
  return rows;
}

TargetPair ResolveTargets(const PipelineConfig& config) {
  if (config.synthetic_targets) {
    TargetPair t = SyntheticTargets();
    t.aba = SetLevel(t.aba, config.target_level_db);
    t.ada = SetLevel(t.ada, config.target_level_db);
    return t;
  }
  if (config.target_aba.empty() || config.target_ada.empty()) {
    throw std::invalid_argument(
        "no target sounds: pass --target-aba and --target-ada WAV files, or "
        "--synthetic-targets to use the bundled pair");
  }
  for (const auto& p : {config.target_aba, config.target_ada}) {
    if (!fs::exists(p)) {
      throw std::invalid_argument("target file not found: " + p.string() +
                                  " (check --target-aba/--target-ada)");
    }
  }
  return LoadTargets(config.target_aba, config.target_ada, config.target_level_db,
                     config.noise.fs, config.noise.length());
}

StageTimer::StageTimer(fs::path dir, std::string stage)
    : dir_(std::move(dir)), stage_(std::move(stage)), start_(NowSeconds()) {}

StageTimer::~StageTimer() {
  try {
    fs::create_directories(dir_);
    const fs::path path = dir_ / kTimingLogName;
    std::string text = fs::exists(path) ? ReadFile(path) : std::string("stage,seconds\n");
    char buf[64];
    std::snprintf(buf, sizeof(buf), ",%.3f\n", NowSeconds() - start_);
    text += stage_ + buf;
    WriteFileAtomic(path, text);
  } catch (...) {
  }
}

void UpdateRunManifest(const fs::path& dir, const PipelineConfig& config) {
  WriteFileAtomic(dir / kRunManifestName, RunManifest::Scan(dir, ConfigHash(config)).ToCsv());
}

std::vector<NoiseManifestRow> RunNoisegen(const PipelineConfig& config,
                                          const NoisegenOptions& options) {
  if (options.count <= 0) throw std::invalid_argument("count must be positive");
  StageTimer timer(config.out_dir, "noisegen");
  WriteConfig(config);
  const NoiseSpec spec = config.NoiseFor(options.kind);
  const fs::path wav_dir = config.out_dir / "noise" / ToString(options.kind);
  if (options.dump_wav) fs::create_directories(wav_dir);
  std::vector<NoiseManifestRow> rows(options.count);
  ParallelFor(options.count, config.ResolvedWorkers(), [&](int i) {
    const int index = options.first_index + i;
    const std::uint64_t seed = NoiseSeed(config.seed, options.kind, index);
    const NoiseToken token = GenerateNoise(spec, seed);
    rows[i] = {options.kind, index, seed, token.spec_id, Rms(token.waveform.samples)};
    if (options.dump_wav) WriteWav(wav_dir / (std::to_string(index) + ".wav"), token.waveform);
  });

  const fs::path manifest_path = config.out_dir / kNoiseManifestName;
  std::vector<NoiseManifestRow> all;
  if (fs::exists(manifest_path)) {
    for (const auto& r : ReadNoiseManifest(manifest_path)) {
      const bool replaced = r.kind == options.kind && r.index >= options.first_index &&
                            r.index < options.first_index + options.count;
      if (!replaced) all.push_back(r);
    }
  }
  all.insert(all.end(), rows.begin(), rows.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return std::pair(a.kind, a.index) < std::pair(b.kind, b.index);
  });
  WriteNoiseManifest(manifest_path, all);
  UpdateRunManifest(config.out_dir, config);
  return rows;
}

std::vector<NoiseValidationResult> RunValidateNoise(const PipelineConfig& config,
                                                    std::span<const NoiseKind> kinds, int count) {
  StageTimer timer(config.out_dir, "validate-noise");
  WriteConfig(config);
  const fs::path dir = config.out_dir / "validation";
  fs::create_directories(dir);
  std::vector<NoiseValidationResult> results;
  for (NoiseKind kind : kinds) {
    const NoiseSpec spec = config.NoiseFor(kind);
    std::vector<Waveform> tokens(count);
    ParallelFor(count, config.ResolvedWorkers(), [&](int i) {
      tokens[i] = GenerateNoise(spec, DeriveSeed(config.seed, "validate/" + ToString(kind), i))
                      .waveform;
    });
    NoiseValidationResult res{kind, ValidateNoiseSet(tokens, NoiseReference::For(kind))};

    std::string checks = "check,measured,expected,tolerance,pass\n";
    for (const auto& c : res.report.checks) {
      checks += c.name + "," + Num(c.measured) + "," + Num(c.expected) + "," + Num(c.tolerance) +
                "," + (c.pass ? "1" : "0") + "\n";
    }
    WriteFileAtomic(dir / (ToString(kind) + ".csv"), checks);

    const auto& env = res.report.envelope;
    std::string spectrum = "freq_hz,median_db,p25_db,p75_db\n";
    for (std::size_t i = 0; i < env.freqs_hz.size(); ++i) {
      spectrum += Num(env.freqs_hz[i]) + "," + Num(env.median_db[i]) + "," + Num(env.p25_db[i]) +
                  "," + Num(env.p75_db[i]) + "\n";
    }
    WriteFileAtomic(dir / (ToString(kind) + "_envelope.csv"), spectrum);

    std::string bands = "center_hz,median_db,p25_db,p75_db\n";
    for (std::size_t i = 0; i < res.report.band_centers_hz.size(); ++i) {
      bands += Num(res.report.band_centers_hz[i]) + "," + Num(res.report.band_median_db[i]) + "," +
               Num(res.report.band_p25_db[i]) + "," + Num(res.report.band_p75_db[i]) + "\n";
    }
    WriteFileAtomic(dir / (ToString(kind) + "_bands.csv"), bands);
    results.push_back(std::move(res));
  }
  UpdateRunManifest(config.out_dir, config);
  return results;
}

SimulateSummary RunSimulate(const PipelineConfig& config, const SimulateOptions& options) {
  const TargetPair targets = ResolveTargets(config);
  StageTimer timer(config.out_dir, "simulate");
  WriteConfig(config);

  auto model = std::make_shared<const AuditoryModel>(config.model);
  TemplateOptions topt;
  topt.snr_db = config.templates.snr_db;
  topt.realizations = config.templates.realizations;
  topt.noise = config.NoiseFor(NoiseKind::kWhite);
  topt.subtract_noise = config.templates.subtract_noise;
  auto templates = std::make_shared<const TemplateSet>(
      DeriveTemplates(*model, targets, DeriveSeed(config.seed, "templates"), topt));
  DecisionOptions dopt;
  dopt.bias_rate = config.templates.bias_rate;
  dopt.adapt_bias = config.templates.adapt_bias;

  SessionConfig session = config.session;
  session.master_seed = config.seed;
  const std::vector<NoiseKind> plan = PlanBlocks(session);
  const int n_blocks = static_cast<int>(plan.size());
  std::vector<int> first_index(n_blocks);
  std::map<NoiseKind, int> used;
  for (int b = 0; b < n_blocks; ++b) {
    first_index[b] = used[plan[b]];
    used[plan[b]] += session.trials_per_block;
  }

  SimulateSummary out;
  out.blocks.resize(n_blocks);
  std::vector<std::vector<NoiseManifestRow>> noise(n_blocks);
  ParallelFor(n_blocks, config.ResolvedWorkers(), [&](int b) {
    BlockSetup setup;
    setup.block_index = b;
    setup.noise = config.NoiseFor(plan[b]);
    setup.master_seed = session.master_seed;
    setup.first_noise_index = first_index[b];
    setup.trials = session.trials_per_block;
    setup.staircase = session.staircase;
    setup.rove = session.rove;
    const fs::path wav_dir = config.out_dir / "noise" / ToString(plan[b]);
    if (options.dump_wav) fs::create_directories(wav_dir);
    const std::string spec_id = setup.noise.Id();
    ArtificialListener listener(model, templates, dopt);
    out.blocks[b] = RunBlock(setup, targets, listener,
                             [&](const TrialRecord& r, const Waveform& w) {
                               const int index = first_index[b] + r.trial_index;
                               noise[b].push_back({r.noise_kind, index, r.noise_seed, spec_id,
                                                   Rms(w.samples)});
                               if (options.dump_wav) {
                                 WriteWav(wav_dir / (std::to_string(index) + ".wav"), w);
                               }
                             });
  });

  std::string blocks = "block_index,noise_kind,trials,reversals,aborted,bias_warning,error\n";
  for (int b = 0; b < n_blocks; ++b) {
    BlockResult& br = out.blocks[b];
    blocks += std::to_string(b) + "," + ToString(plan[b]) + "," +
              std::to_string(br.records.size()) + "," + std::to_string(br.reversals) + "," +
              (br.aborted ? "1" : "0") + "," + (br.bias_warning ? "1" : "0") + "," + br.error +
              "\n";
    if (br.aborted) out.warnings.push_back("block " + std::to_string(b) + " aborted: " + br.error);
    if (br.bias_warning) {
      out.warnings.push_back("block " + std::to_string(b) + ": response ratio outside 40-60%");
    }
    out.records.insert(out.records.end(), br.records.begin(), br.records.end());
    br.records.clear();
    out.noise.insert(out.noise.end(), noise[b].begin(), noise[b].end());
  }
  std::stable_sort(out.noise.begin(), out.noise.end(), [](const auto& a, const auto& b) {
    return std::pair(a.kind, a.index) < std::pair(b.kind, b.index);
  });

  WriteTrialLog(config.out_dir / kTrialLogName, out.records);
  WriteFileAtomic(config.out_dir / kBlockLogName, blocks);
  WriteNoiseManifest(config.out_dir / kNoiseManifestName, out.noise);
  UpdateRunManifest(config.out_dir, config);
  return out;
}

std::vector<TrialRecord> SelectFitTrials(std::span<const TrialRecord> log, NoiseKind kind,
                                         const FitConfig& fit, std::vector<std::string>* warnings) {
  const std::vector<TrialRecord> of_kind = OfKind(log, kind);
  std::map<int, std::vector<TrialRecord>> blocks;
  for (const auto& r : of_kind) blocks[r.block_index].push_back(r);
  std::vector<TrialRecord> kept;
  for (auto& [index, block] : blocks) {
    std::sort(block.begin(), block.end(),
              [](const auto& a, const auto& b) { return a.trial_index < b.trial_index; });
    if (!fit.exclude_approach) {
      kept.insert(kept.end(), block.begin(), block.end());
      continue;
    }
    ExclusionResult ex = ExcludeApproachPhase(block);
    if (!ex.warning.empty() && warnings != nullptr) {
      warnings->push_back("block " + std::to_string(index) + ": " + ex.warning);
    }
    kept.insert(kept.end(), ex.records.begin(), ex.records.end());
  }
  if (fit.balance) kept = BalanceResponses(kept);
  return kept;
}

FitDataset BuildDataset(const PipelineConfig& config, std::span<const TrialRecord> records,
                        std::span<const NoiseManifestRow> manifest) {
  std::map<std::pair<NoiseKind, std::uint64_t>, const NoiseManifestRow*> by_seed;
  for (const auto& row : manifest) by_seed[{row.kind, row.seed}] = &row;

  std::vector<std::string> errors;
  std::vector<const NoiseManifestRow*> rows(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto it = by_seed.find({r.noise_kind, r.noise_seed});
    const std::string where = "block " + std::to_string(r.block_index) + " trial " +
                              std::to_string(r.trial_index) + " (" + ToString(r.noise_kind) +
                              " seed " + std::to_string(r.noise_seed) + ")";
    if (it == by_seed.end()) {
      errors.push_back(where + ": seed not in noise manifest");
      continue;
    }
    const std::string expected = config.NoiseFor(r.noise_kind).Id();
    if (it->second->spec_id != expected) {
      errors.push_back(where + ": spec '" + it->second->spec_id + "' differs from config '" +
                       expected + "'");
      continue;
    }
    rows[i] = it->second;
  }
  if (!errors.empty()) {
    throw ManifestError(std::to_string(errors.size()) + " trial(s) without valid noise:" +
                        JoinErrors(errors));
  }

  const int n = static_cast<int>(records.size());
  FitDataset data;
  data.x.resize(n, kTfSize);
  data.y.resize(n);
  data.correct.resize(n);
  std::vector<std::string> mismatch(n);
  const TfAnalyzer analyzer(config.noise.fs);
  ParallelFor(n, config.ResolvedWorkers(), [&](int i) {
    const auto& r = records[i];
    const NoiseToken token = GenerateNoise(config.NoiseFor(r.noise_kind), r.noise_seed);
    const double rms = Rms(token.waveform.samples);
    if (rms != rows[i]->rms) {
      mismatch[i] = "seed " + std::to_string(r.noise_seed) + ": regenerated rms " + Num(rms) +
                    " != manifest " + Num(rows[i]->rms);
    }
    data.x.row(i) = Vectorize(analyzer.Analyze(token.waveform)).transpose();
  });
  for (int i = 0; i < n; ++i) {
    if (!mismatch[i].empty()) errors.push_back(mismatch[i]);
    data.y[i] = ResponseCode(records[i].response);
    data.correct[i] = records[i].correct;
  }
  if (!errors.empty()) {
    throw ManifestError(std::to_string(errors.size()) +
                        " noise token(s) do not regenerate as recorded:" + JoinErrors(errors));
  }
  return data;
}

PreparedData PrepareData(const PipelineConfig& config, std::span<const TrialRecord> log,
                         std::span<const NoiseManifestRow> manifest, NoiseKind kind) {
  PreparedData p;
  p.kind = kind;
  p.records = SelectFitTrials(log, kind, config.fit, &p.warnings);
  p.data = BuildDataset(config, p.records, manifest);
  return p;
}

std::uint64_t FitSeed(const PipelineConfig& config, NoiseKind kind) {
  return DeriveSeed(config.seed, "fit/" + ToString(kind));
}

fs::path FitDir(const fs::path& out_dir, NoiseKind kind) {
  return out_dir / "fit" / ToString(kind);
}

void SaveFitArtifacts(const fs::path& dir, const FitArtifacts& a) {
  fs::create_directories(dir / "folds");
  const FitResult& fit = a.fit;
  SaveAci(dir / "aci", fit.aci);
  WriteDeviancePath(dir / "deviance_path.csv", fit.cv);
  for (std::size_t f = 0; f < fit.fold_acis.size(); ++f) {
    SaveAci(dir / "folds" / ("fold" + std::to_string(f)), fit.fold_acis[f]);
  }
  std::string nulls = "fold,null_intercept\n";
  for (std::size_t f = 0; f < fit.fold_null_intercepts.size(); ++f) {
    nulls += std::to_string(f) + "," + Num(fit.fold_null_intercepts[f]) + "\n";
  }
  WriteFileAtomic(dir / "fold_nulls.csv", nulls);
  std::string rows = "block_index,trial_index,fold\n";
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    rows += std::to_string(a.rows[i].first) + "," + std::to_string(a.rows[i].second) + "," +
            std::to_string(fit.fold_of[i]) + "\n";
  }
  WriteFileAtomic(dir / "rows.csv", rows);
  WriteFileAtomic(dir / "auto_prediction.csv",
                  PredictionCsv(ToString(a.kind), a.auto_all, a.auto_incorrect));
  WriteFileAtomic(dir / "fold_metrics.csv", FoldMetricsCsv(a.auto_all, a.auto_incorrect));
  std::string warnings = "warning\n";
  for (const auto& w : fit.warnings) warnings += w + "\n";
  WriteFileAtomic(dir / "warnings.csv", warnings);
}

FitArtifacts LoadFitArtifacts(const fs::path& dir, NoiseKind kind) {
  if (!fs::exists(dir / "aci.meta.csv")) {
    throw std::runtime_error("no fitted ACI in " + dir.string() + " (run `revcorr fit` first)");
  }
  FitArtifacts a;
  a.kind = kind;
  a.fit.aci = LoadAci(dir / "aci");
  const auto null_lines = Lines(ReadFile(dir / "fold_nulls.csv"));
  for (std::size_t i = 1; i < null_lines.size(); ++i) {
    if (null_lines[i].empty()) continue;
    const auto f = SplitCsv(null_lines[i]);
    if (f.size() != 2) throw std::runtime_error("bad row in fold_nulls.csv");
    a.fit.fold_null_intercepts.push_back(ParseNumber(f[1]));
  }
  for (std::size_t f = 0; f < a.fit.fold_null_intercepts.size(); ++f) {
    a.fit.fold_acis.push_back(LoadAci(dir / "folds" / ("fold" + std::to_string(f))));
  }
  const auto row_lines = Lines(ReadFile(dir / "rows.csv"));
  for (std::size_t i = 1; i < row_lines.size(); ++i) {
    if (row_lines[i].empty()) continue;
    const auto f = SplitCsv(row_lines[i]);
    if (f.size() != 3) throw std::runtime_error("bad row in rows.csv");
    a.rows.emplace_back(std::stoi(f[0]), std::stoi(f[1]));
    a.fit.fold_of.push_back(std::stoi(f[2]));
  }
  return a;
}

FitCommandResult RunFit(const PipelineConfig& config, const FitCommandOptions& options) {
  StageTimer timer(config.out_dir, "fit");
  const fs::path log_path = options.trial_log.value_or(config.out_dir / kTrialLogName);
  const fs::path manifest_path =
      options.noise_manifest.value_or(config.out_dir / kNoiseManifestName);
  const std::vector<TrialRecord> log = ReadTrialLog(log_path);
  const std::vector<NoiseManifestRow> manifest = ReadNoiseManifest(manifest_path);
  const std::vector<NoiseKind> kinds = options.kinds.empty() ? KindsInLog(log) : options.kinds;

  // Validate and build every dataset before writing anything.
  std::vector<PreparedData> prepared;
  for (NoiseKind kind : kinds) prepared.push_back(PrepareData(config, log, manifest, kind));

  WriteConfig(config);
  const PyramidBasis basis = PyramidBasis::Build();
  FitCommandResult result;
  for (auto& p : prepared) {
    FitOptions fopt;
    fopt.cv = config.MakeCvOptions(FitSeed(config, p.kind));
    fopt.standardize = config.fit.standardize;
    FitArtifacts a;
    a.kind = p.kind;
    a.fit = FitAci(p.data, basis, fopt);
    a.fit.warnings.insert(a.fit.warnings.begin(), p.warnings.begin(), p.warnings.end());
    for (const auto& r : p.records) a.rows.emplace_back(r.block_index, r.trial_index);
    a.auto_all = AutoPrediction(a.fit, p.data, false);
    a.auto_incorrect = AutoPrediction(a.fit, p.data, true);
    SaveFitArtifacts(FitDir(config.out_dir, p.kind), a);
    result.any_null = result.any_null || a.fit.aci.is_null;
    result.fits.push_back(std::move(a));
  }
  UpdateRunManifest(config.out_dir, config);
  return result;
}

std::vector<PredictionReport> RunPredict(const PipelineConfig& config,
                                         const PredictCommandOptions& options) {
  StageTimer timer(config.out_dir, "predict");
  const std::vector<TrialRecord> log = ReadTrialLog(config.out_dir / kTrialLogName);
  const auto manifest = ReadNoiseManifest(config.out_dir / kNoiseManifestName);
  const LoadedFit target = LoadFitWithData(config, options.dataset, log, manifest);
  const NoiseKind source_kind = options.aci.value_or(options.dataset);

  std::vector<PredictionReport> reports;
  for (bool inc : {false, true}) {
    if (source_kind == options.dataset) {
      reports.push_back(AutoPrediction(target.artifacts.fit, target.data, inc));
    } else {
      const Aci source = LoadAci(FitDir(config.out_dir, source_kind) / "aci");
      reports.push_back(CrossPredict(source, target.artifacts.fit, target.data, inc));
    }
  }
  const std::string label = ToString(source_kind) + "_on_" + ToString(options.dataset);
  fs::create_directories(config.out_dir / "predict");
  WriteFileAtomic(config.out_dir / "predict" / (label + ".csv"),
                  PredictionCsv(label, reports[0], reports[1]));
  UpdateRunManifest(config.out_dir, config);
  return reports;
}

std::vector<CrossPredMatrix> RunCrossPred(const PipelineConfig& config) {
  StageTimer timer(config.out_dir, "crosspred");
  const std::vector<NoiseKind> kinds = FittedKinds(config.out_dir);
  if (kinds.empty()) throw std::runtime_error("no fitted conditions (run `revcorr fit` first)");
  const std::vector<TrialRecord> log = ReadTrialLog(config.out_dir / kTrialLogName);
  const auto manifest = ReadNoiseManifest(config.out_dir / kNoiseManifestName);
  std::vector<LoadedFit> loaded;
  for (NoiseKind k : kinds) loaded.push_back(LoadFitWithData(config, k, log, manifest));
  std::vector<CrossPredEntry> entries;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    entries.push_back({ToString(kinds[i]), &loaded[i].artifacts.fit, &loaded[i].data});
  }

  std::vector<CrossPredMatrix> out;
  std::string summary = "source_aci," + SummaryHeader() + ",masked\n";
  for (bool inc : {false, true}) {
    CrossPredMatrix m = CrossPrediction(entries, inc);
    const fs::path dir = config.out_dir / "crosspred" / (inc ? "incorrect" : "all");
    fs::create_directories(dir);
    WriteCrossPredCsv(dir, m);
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
      for (std::size_t j = 0; j < m.labels.size(); ++j) {
        summary += m.labels[j] + "," + SummaryRow(m.labels[i], m.cells[i][j].report) + "," +
                   (m.cells[i][j].masked ? "1" : "0") + "\n";
      }
    }
    out.push_back(std::move(m));
  }
  WriteFileAtomic(config.out_dir / "crosspred" / "summary.csv", summary);
  UpdateRunManifest(config.out_dir, config);
  return out;
}

std::pair<double, double> MeanAndErrorBar(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, 1.64 * sem};
}

ReportResult RunReport(const PipelineConfig& config) {
  StageTimer timer(config.out_dir, "report");
  const fs::path dir = config.out_dir / "report";
  fs::create_directories(dir);
  ReportResult result;
  auto write = [&](const std::string& name, const std::string& text) {
    WriteFileAtomic(dir / name, text);
    result.written.push_back(name);
  };
  const std::vector<NoiseKind> all_kinds = {NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps};

  const fs::path log_path = config.out_dir / kTrialLogName;
  if (fs::exists(log_path)) {
    const std::vector<TrialRecord> log = ReadTrialLog(log_path);
    std::string thresholds = "block_index,noise_kind,threshold_db,percent_correct,n_trials\n";
    std::string bins =
        "noise_kind,snr_db,n_aba,n_ada,pc_aba,pc_ada,hit_rate,false_alarm_rate,dprime,criterion\n";
    for (NoiseKind kind : KindsInLog(log)) {
      FitConfig no_balance = config.fit;
      no_balance.balance = false;
      const auto kept = SelectFitTrials(log, kind, no_balance);
      const BehavioralSummary s = BehavioralMetrics(OfKind(log, kind));
      for (const auto& t : s.thresholds) {
        thresholds += std::to_string(t.block_index) + "," + ToString(t.noise_kind) + "," +
                      Num(t.threshold_db) + "," + Num(t.percent_correct) + "," +
                      std::to_string(t.n_trials) + "\n";
      }
      for (const auto& b : BehavioralMetrics(kept).bins) {
        bins += ToString(kind) + "," + Num(b.snr_center_db) + "," + std::to_string(b.n_aba) + "," +
                std::to_string(b.n_ada) + "," + Num(b.pc_aba) + "," + Num(b.pc_ada) + "," +
                Num(b.hit_rate) + "," + Num(b.false_alarm_rate) + "," + Num(b.dprime) + "," +
                Num(b.criterion) + "\n";
      }
    }
    write("thresholds.csv", thresholds);
    write("snr_bins.csv", bins);
  } else {
    result.missing.push_back(kTrialLogName);
  }

  std::string delta = "noise_kind,variant,metric,mean,error_bar,n_folds\n";
  for (NoiseKind kind : all_kinds) {
    const fs::path fit_dir = FitDir(config.out_dir, kind);
    const fs::path metrics = fit_dir / "fold_metrics.csv";
    if (!fs::exists(metrics)) {
      result.missing.push_back("fit/" + ToString(kind));
      continue;
    }
    std::map<std::string, std::vector<double>> cvd, pa;
    const auto lines = Lines(ReadFile(metrics));
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto f = SplitCsv(lines[i]);
      cvd[f.at(0)].push_back(ParseNumber(f.at(2)));
      pa[f.at(0)].push_back(ParseNumber(f.at(3)));
    }
    for (const char* variant : {"all_trials", "incorrect_only"}) {
      for (auto* m : {&cvd, &pa}) {
        const auto& values = (*m)[variant];
        const auto [mean, err] = MeanAndErrorBar(values);
        delta += ToString(kind) + "," + variant + "," + (m == &cvd ? "delta_cvd_t" : "delta_pa") +
                 "," + Num(mean) + "," + Num(err) + "," + std::to_string(values.size()) + "\n";
      }
    }
    const Aci aci = LoadAci(fit_dir / "aci");
    std::string map = "frame";
    for (int b = 0; b < kTfBands; ++b) map += ",band" + std::to_string(b);
    map += "\n";
    for (int t = 0; t < kTfFrames; ++t) {
      map += std::to_string(t);
      for (int b = 0; b < kTfBands; ++b) map += "," + Num(aci.weights(t, b));
      map += "\n";
    }
    write("aci_" + ToString(kind) + ".csv", map);
  }
  write("delta_metrics.csv", delta);

  for (const char* variant : {"all", "incorrect"}) {
    const fs::path src = config.out_dir / "crosspred" / variant;
    if (!fs::exists(src / "delta_pa.csv")) {
      result.missing.push_back(std::string("crosspred/") + variant);
      continue;
    }
    for (const char* name : {"delta_pa.csv", "delta_cvd_t.csv", "significant.csv", "masked.csv"}) {
      write(std::string("crosspred_") + variant + "_" + name, ReadFile(src / name));
    }
  }

  std::string missing = "artifact\n";
  for (const auto& m : result.missing) missing += m + "\n";
  WriteFileAtomic(dir / "missing.csv", missing);
  UpdateRunManifest(config.out_dir, config);
  return result;
}

}  // namespace revcorr
