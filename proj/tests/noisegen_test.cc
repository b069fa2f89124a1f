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

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "revcorr/noisegen.h"
#include "revcorr/parallel.h"
#include "revcorr/rng.h"

namespace revcorr {
namespace {

std::vector<Waveform> Tokens(const NoiseSpec& spec, int n, std::uint64_t base) {
  std::vector<Waveform> out(n);
  ParallelFor(n, DefaultWorkers(), [&](int i) { out[i] = GenerateNoise(spec, base + i).waveform; });
  return out;
}

TEST(NoiseSpecTest, Defaults) {
  const NoiseSpec spec = NoiseSpec::Default(NoiseKind::kBump);
  EXPECT_EQ(spec.fs, 16000.0);
  EXPECT_EQ(spec.length(), 13760u);
  EXPECT_EQ(spec.level_db, 65.0);
  EXPECT_EQ(spec.ramp_s, 0.075);
  EXPECT_EQ(spec.bump.n_bumps, 30);
  EXPECT_EQ(spec.bump.sigma_t_s, 0.02);
  EXPECT_EQ(spec.bump.sigma_f_erb, 0.5);
  EXPECT_EQ(spec.bump.max_gain_db, 10.0);
  EXPECT_GE(NoiseSpec::Default(NoiseKind::kMps).mps.phase_retrieval_iters, 50);
  EXPECT_EQ(NoiseSpec::Default(NoiseKind::kMps).mps.temporal_cutoff_hz, 35.0);
}

TEST(NoiseKindTest, NamesRoundTrip) {
  for (NoiseKind k : {NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps}) {
    EXPECT_EQ(ParseNoiseKind(ToString(k)), k);
  }
  EXPECT_THROW(ParseNoiseKind("pink"), std::invalid_argument);
}

class GeneratorTest : public ::testing::TestWithParam<NoiseKind> {};

TEST_P(GeneratorTest, LengthLevelAndFiniteness) {
  const NoiseToken t = GenerateNoise(NoiseSpec::Default(GetParam()), 12);
  ASSERT_EQ(t.waveform.size(), 13760u);
  for (double s : t.waveform.samples) ASSERT_TRUE(std::isfinite(s));
  // Level is set before the ramps, which remove a little energy.
  const double level = LevelDb(t.waveform);
  EXPECT_LT(level, 65.0);
  EXPECT_GT(level, 64.0);
}

TEST_P(GeneratorTest, RegenerationIsBitExact) {
  const NoiseSpec spec = NoiseSpec::Default(GetParam());
  const NoiseToken a = GenerateNoise(spec, 99);
  const NoiseToken b = GenerateNoise(spec, 99);
  EXPECT_EQ(a.waveform.samples, b.waveform.samples);
  EXPECT_EQ(a.spec_id, b.spec_id);
  EXPECT_NE(GenerateNoise(spec, 100).waveform.samples, a.waveform.samples);
}

TEST_P(GeneratorTest, ThreadCountDoesNotChangeTokens) {
  const NoiseSpec spec = NoiseSpec::Default(GetParam());
  std::vector<Waveform> serial(4), parallel(4);
  ParallelFor(4, 1, [&](int i) { serial[i] = GenerateNoise(spec, 500 + i).waveform; });
  ParallelFor(4, 4, [&](int i) { parallel[i] = GenerateNoise(spec, 500 + i).waveform; });
  for (int i = 0; i < 4; ++i) EXPECT_EQ(serial[i].samples, parallel[i].samples);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, GeneratorTest,
                         ::testing::Values(NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps),
                         [](const auto& info) { return ToString(info.param); });

TEST(BumpTest, ZeroBumpsMatchesWhiteStatistics) {
  NoiseSpec bump = NoiseSpec::Default(NoiseKind::kBump);
  bump.bump.n_bumps = 0;
  const auto b = EnvelopeSpectrum(Tokens(bump, 200, 1000));
  const auto w = EnvelopeSpectrum(Tokens(NoiseSpec::Default(NoiseKind::kWhite), 200, 1000));
  EXPECT_NEAR(b.MedianOver(2, 60), w.MedianOver(2, 60), 0.5);
}

TEST(MpsTest, AllPassMaskMatchesWhiteStatistics) {
  NoiseSpec mps = NoiseSpec::Default(NoiseKind::kMps);
  mps.mps.temporal_cutoff_hz = std::numeric_limits<double>::infinity();
  mps.mps.spectral_cutoff = std::numeric_limits<double>::infinity();
  const auto m = EnvelopeSpectrum(Tokens(mps, 100, 2000));
  const auto w = EnvelopeSpectrum(Tokens(NoiseSpec::Default(NoiseKind::kWhite), 100, 2000));
  EXPECT_NEAR(m.MedianOver(2, 60), w.MedianOver(2, 60), 0.5);
}

TEST(EnvelopeOrderingTest, BumpAboveMpsAboveWhiteAtFourHz) {
  const auto w = EnvelopeSpectrum(Tokens(NoiseSpec::Default(NoiseKind::kWhite), 100, 3000));
  const auto b = EnvelopeSpectrum(Tokens(NoiseSpec::Default(NoiseKind::kBump), 100, 3000));
  const auto m = EnvelopeSpectrum(Tokens(NoiseSpec::Default(NoiseKind::kMps), 100, 3000));
  EXPECT_GT(b.At(4.0), m.At(4.0));
  EXPECT_GT(m.At(4.0), w.At(4.0));
}

TEST(ValidationTest, WhiteSetMatchesWhiteButNotBumpReference) {
  const auto tokens = Tokens(NoiseSpec::Default(NoiseKind::kWhite), 150, 4000);
  const ValidationReport white = ValidateNoiseSet(tokens, NoiseReference::For(NoiseKind::kWhite));
  for (const auto& c : white.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.measured;
  const ValidationReport bump = ValidateNoiseSet(tokens, NoiseReference::For(NoiseKind::kBump));
  ASSERT_FALSE(bump.checks.empty());
  EXPECT_EQ(bump.checks[0].name, "envelope at 3 Hz");
  EXPECT_FALSE(bump.checks[0].pass);
  EXPECT_FALSE(bump.pass());
}

TEST(ValidationTest, EmptySetIsAnError) {
  EXPECT_THROW(ValidateNoiseSet({}, NoiseReference::For(NoiseKind::kWhite)),
               std::invalid_argument);
}

TEST(CriticalBandTest, SpectraOfTheThreeKindsAgree) {
  const auto centers = DefaultCriticalBandCenters();
  std::vector<std::vector<double>> mean(3, std::vector<double>(centers.size(), 0.0));
  const int n = 40;
  int k = 0;
  for (NoiseKind kind : {NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps}) {
    for (const Waveform& w : Tokens(NoiseSpec::Default(kind), n, 5000)) {
      const auto levels = CriticalBandLevels(w, centers);
      for (std::size_t b = 0; b < centers.size(); ++b) mean[k][b] += levels[b] / n;
    }
    ++k;
  }
  for (std::size_t b = 0; b < centers.size(); ++b) {
    EXPECT_NEAR(mean[1][b], mean[0][b], 1.5) << "bump band " << b;
    EXPECT_NEAR(mean[2][b], mean[0][b], 1.5) << "mps band " << b;
  }
}

}  // namespace
}  // namespace revcorr
