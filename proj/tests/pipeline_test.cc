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

#include <filesystem>
#include <string>

#include "gtest/gtest.h"
#include "revcorr/config.h"
#include "revcorr/manifest.h"
#include "revcorr/pipeline.h"

namespace revcorr {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("revcorr_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig SmallWhiteRun(const fs::path& out) {
  PipelineConfig c;
  c.out_dir = out;
  c.seed = 5;
  c.synthetic_targets = true;
  c.session.n_blocks = 2;
  c.session.trials_per_block = 150;
  c.session.master_seed = 5;
  c.session.conditions = {NoiseKind::kWhite};
  c.fit.n_lambdas = 8;
  c.fit.lambda_min = 0.01;
  return c;
}

TEST(ConfigTest, IniRoundTripPreservesHash) {
  PipelineConfig c;
  c.seed = 42;
  c.session.n_blocks = 7;
  c.session.conditions = {NoiseKind::kMps, NoiseKind::kWhite};
  c.templates.bias_rate = 0.02;
  c.fit.folds = 5;
  const PipelineConfig back = ParseIni(ToIni(c));
  EXPECT_EQ(ToIni(back), ToIni(c));
  EXPECT_EQ(ConfigHash(back), ConfigHash(c));
  EXPECT_EQ(back.session.conditions, c.session.conditions);
  PipelineConfig d = c;
  d.fit.folds = 6;
  EXPECT_NE(ConfigHash(d), ConfigHash(c));
}

TEST(ConfigTest, UnknownKeyIsAnError) {
  EXPECT_ANY_THROW(ParseIni("[fit]\nfoldz = 3\n"));
}

TEST(NoiseManifestTest, RoundTripAndMalformedRows) {
  const fs::path dir = Scratch("manifest");
  PipelineConfig c;
  c.out_dir = dir;
  NoisegenOptions opt;
  opt.count = 3;
  opt.first_index = 4;
  const auto rows = RunNoisegen(c, opt);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].index, 4);
  const auto back = ReadNoiseManifest(dir / kNoiseManifestName);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].seed, rows[i].seed);
    EXPECT_EQ(back[i].rms, rows[i].rms);
    EXPECT_EQ(back[i].spec_id, rows[i].spec_id);
  }

  WriteFileAtomic(dir / "bad.csv",
                  "noise_kind,noise_index,seed,spec_id,rms\n"
                  "white,0,1,abc,0.1\n"
                  "pink,1,2,abc,0.1\n"
                  "white,2,notanumber,abc,0.1\n");
  try {
    ReadNoiseManifest(dir / "bad.csv");
    FAIL() << "expected ManifestError";
  } catch (const ManifestError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 3"), std::string::npos) << what;
    EXPECT_NE(what.find("line 4"), std::string::npos) << what;
  }
}

TEST(TargetsTest, MissingTargetsNameTheFlags) {
  PipelineConfig c;
  try {
    ResolveTargets(c);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("--target-aba"), std::string::npos);
    EXPECT_NE(what.find("--synthetic-targets"), std::string::npos);
  }
}

TEST(MeanAndErrorBarTest, OneSidedNinetyFivePercent) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto [mean, bar] = MeanAndErrorBar(v);
  EXPECT_DOUBLE_EQ(mean, 2.5);
  EXPECT_NEAR(bar, 1.64 * std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
}

class EndToEndTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(Scratch("e2e"));
    sim_ = new SimulateSummary(RunSimulate(SmallWhiteRun(*dir_)));
  }
  static void TearDownTestSuite() {
    delete sim_;
    delete dir_;
  }
  static inline fs::path* dir_ = nullptr;
  static inline SimulateSummary* sim_ = nullptr;
};

TEST_F(EndToEndTest, SimulationWritesLogsAndManifest) {
  EXPECT_EQ(sim_->records.size(), 300u);
  EXPECT_EQ(sim_->noise.size(), 300u);
  for (const char* name : {kConfigName, kTrialLogName, kBlockLogName, kNoiseManifestName,
                           "run_manifest.csv", "timing.csv"}) {
    EXPECT_TRUE(fs::exists(*dir_ / name)) << name;
  }
  EXPECT_EQ(Sha256File(*dir_ / kConfigName), ConfigHash(SmallWhiteRun(*dir_)));
  EXPECT_EQ(ReadTrialLog(*dir_ / kTrialLogName).size(), 300u);
}

TEST_F(EndToEndTest, SimulationIsReproducible) {
  const fs::path other = Scratch("e2e_repeat");
  PipelineConfig c = SmallWhiteRun(other);
  c.workers = 1;
  RunSimulate(c);
  for (const char* name : {kTrialLogName, kBlockLogName, kNoiseManifestName}) {
    EXPECT_EQ(Sha256File(other / name), Sha256File(*dir_ / name)) << name;
  }
  fs::remove_all(other);
}

TEST_F(EndToEndTest, FitWritesArtifactsAndReloads) {
  const PipelineConfig c = SmallWhiteRun(*dir_);
  const FitCommandResult r = RunFit(c);
  ASSERT_EQ(r.fits.size(), 1u);
  const fs::path fit_dir = FitDir(*dir_, NoiseKind::kWhite);
  for (const char* name : {"aci.weights.csv", "aci.meta.csv", "deviance_path.csv", "rows.csv",
                           "fold_nulls.csv", "auto_prediction.csv"}) {
    EXPECT_TRUE(fs::exists(fit_dir / name)) << name;
  }
  const FitArtifacts back = LoadFitArtifacts(fit_dir, NoiseKind::kWhite);
  EXPECT_EQ(back.rows, r.fits[0].rows);
  EXPECT_EQ(back.fit.fold_of, r.fits[0].fit.fold_of);
  EXPECT_EQ(back.fit.aci.intercept, r.fits[0].fit.aci.intercept);

  const auto reports = RunPredict(c, {NoiseKind::kWhite, std::nullopt});
  ASSERT_FALSE(reports.empty());
  EXPECT_NEAR(reports[0].delta_pa, r.fits[0].auto_all.delta_pa, 1e-9);
  EXPECT_TRUE(fs::exists(*dir_ / "predict"));
}

TEST_F(EndToEndTest, MissingNoiseRowsAbortBeforeWriting) {
  const fs::path other = Scratch("e2e_missing");
  PipelineConfig c = SmallWhiteRun(other);
  auto manifest = ReadNoiseManifest(*dir_ / kNoiseManifestName);
  std::vector<NoiseManifestRow> partial;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (i % 10 != 5) partial.push_back(manifest[i]);
  }
  WriteNoiseManifest(other / "partial.csv", partial);
  FitCommandOptions opt;
  opt.trial_log = *dir_ / kTrialLogName;
  opt.noise_manifest = other / "partial.csv";
  EXPECT_THROW(RunFit(c, opt), ManifestError);
  EXPECT_FALSE(fs::exists(FitDir(other, NoiseKind::kWhite) / "aci.weights.csv"));
  fs::remove_all(other);
}

}  // namespace
}  // namespace revcorr
