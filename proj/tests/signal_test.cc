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
#include <filesystem>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "revcorr/erb.h"
#include "revcorr/fft.h"
#include "revcorr/filters.h"
#include "revcorr/manifest.h"
#include "revcorr/rng.h"
#include "revcorr/signal.h"
#include "revcorr/wav.h"

namespace revcorr {
namespace {

Waveform Ones(std::size_t n = kStimulusLength) {
  Waveform w;
  w.samples.assign(n, 1.0);
  return w;
}

Waveform Gaussian(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> dist;
  Waveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = dist(rng);
  return w;
}

TEST(LevelTest, UnitRmsIsOneHundredDb) {
  Waveform w = Ones();
  EXPECT_NEAR(LevelDb(w), 100.0, 1e-12);
  const Waveform same = SetLevel(w, 100.0);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_DOUBLE_EQ(same.samples[i], 1.0);
}

TEST(LevelTest, SixtyFiveDbRms) {
  const Waveform w = SetLevel(Gaussian(5000, 3), 65.0);
  double ss = 0.0;
  for (double s : w.samples) ss += s * s;
  EXPECT_NEAR(std::sqrt(ss / w.size()), 0.017783, 1e-6);
  EXPECT_NEAR(RmsForLevel(65.0), std::pow(10.0, -35.0 / 20.0), 1e-15);
}

TEST(LevelTest, UnitSineReadsNinetySeven) {
  Waveform w;
  for (int i = 0; i < 16000; ++i) w.samples.push_back(std::sin(2 * std::numbers::pi * 1000 * i / 16000.0));
  EXPECT_NEAR(LevelDb(w), 96.99, 0.005);
}

TEST(LevelTest, SetLevelIsIdempotent) {
  const Waveform once = SetLevel(Gaussian(4000, 5), 72.0);
  const Waveform twice = SetLevel(once, 72.0);
  EXPECT_NEAR(LevelDb(twice), LevelDb(once), 1e-9);
}

TEST(RampTest, MidpointIsHalf) {
  const Waveform w = ApplyRamps(Ones(), 0.075);
  EXPECT_NEAR(w.samples[600], 0.5, 1e-6);  // 37.5 ms
  EXPECT_NEAR(w.samples[w.size() - 1 - 600], 0.5, 1e-6);
}

TEST(RampTest, ZeroDurationIsIdentity) {
  const Waveform g = Gaussian(1000, 1);
  EXPECT_EQ(ApplyRamps(g, 0.0).samples, g.samples);
}

TEST(RampTest, MeanOfRampedOnes) {
  const Waveform w = ApplyRamps(Ones(), 0.075);
  double sum = 0.0;
  for (double s : w.samples) sum += s;
  EXPECT_NEAR(sum / w.size(), 0.9128, 5e-4);
}

TEST(RampTest, NeverIncreasesMagnitude) {
  const Waveform g = Gaussian(kStimulusLength, 9);
  const Waveform r = ApplyRamps(g, 0.075);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(std::abs(r.samples[i]), std::abs(g.samples[i]));
}

TEST(MixTest, ZeroDbGivesEqualRms) {
  const Waveform t = SetLevel(Gaussian(8000, 1), 70.0);
  const Waveform n = SetLevel(Gaussian(8000, 2), 65.0);
  const Waveform m = MixAtSnr(t, n, Snr::Db(0.0));
  Waveform target_part = m;
  for (std::size_t i = 0; i < m.size(); ++i) target_part.samples[i] -= n.samples[i];
  EXPECT_NEAR(LevelDb(target_part), LevelDb(n), 1e-9);
}

TEST(MixTest, MinusTenDbScalesTargetToFiftyFive) {
  const Waveform t = SetLevel(Gaussian(8000, 1), 80.0);
  const Waveform n = SetLevel(Gaussian(8000, 2), 65.0);
  const Waveform m = MixAtSnr(t, n, Snr::Db(-10.0));
  Waveform target_part = m;
  for (std::size_t i = 0; i < m.size(); ++i) target_part.samples[i] -= n.samples[i];
  EXPECT_NEAR(LevelDb(target_part), 55.0, 1e-9);
}

TEST(MixTest, MinusInfinityReturnsNoise) {
  const Waveform t = Gaussian(100, 1);
  const Waveform n = Gaussian(100, 2);
  EXPECT_EQ(MixAtSnr(t, n, Snr::MinusInfinity()).samples, n.samples);
}

TEST(MixTest, LinearInInputsForFixedSnr) {
  const Waveform t = Gaussian(500, 1);
  const Waveform n = Gaussian(500, 2);
  const Waveform m1 = MixAtSnr(t, n, Snr::Db(-3.0));
  const Waveform m2 = MixAtSnr(Scale(t, 2.0), Scale(n, 2.0), Snr::Db(-3.0));
  for (std::size_t i = 0; i < 500; ++i) EXPECT_NEAR(m2.samples[i], 2.0 * m1.samples[i], 1e-12);
}

TEST(MixTest, RejectsLengthMismatch) {
  EXPECT_THROW(MixAtSnr(Gaussian(10, 1), Gaussian(11, 1), Snr::Db(0)), std::invalid_argument);
}

TEST(RoveTest, ReplayIsIdentical) {
  Rng a(42), b(42);
  const Waveform w = Gaussian(100, 1);
  EXPECT_EQ(RoveLevel(w, a).rove_db, RoveLevel(w, b).rove_db);
}

TEST(RoveTest, DrawsAreCentredAndBounded) {
  Rng rng(7);
  const Waveform w = Ones(4);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double r = RoveLevel(w, rng).rove_db;
    ASSERT_GE(r, -2.5);
    ASSERT_LE(r, 2.5);
    sum += r;
  }
  EXPECT_NEAR(sum / 100000, 0.0, 0.02);
}

TEST(RoveTest, GainDefinition) {
  const Waveform w = Gaussian(100, 1);
  EXPECT_NEAR(Rms(ApplyGainDb(w, 2.5).samples) / Rms(w.samples), std::pow(10.0, 2.5 / 20.0), 1e-12);
}

TEST(EnvelopeTest, GaussianMeanEnvelopeRatio) {
  const Waveform g = Gaussian(1 << 20, 11);
  const auto env = HilbertEnvelope(g.samples);
  double mean = 0.0;
  for (double e : env) mean += e;
  mean /= env.size();
  EXPECT_NEAR(mean / Rms(g.samples), std::sqrt(std::numbers::pi / 2.0), 0.0125);
}

TEST(EnvelopeTest, DcSignalHasNoFluctuation) {
  const auto spec = EnvelopeSpectrumDb(Ones(4096).samples);
  for (std::size_t k = 1; k < spec.size(); ++k) EXPECT_TRUE(std::isinf(spec[k]) && spec[k] < 0);
}

TEST(PercentileTest, Median) {
  EXPECT_DOUBLE_EQ(Percentile({3, 1, 2}, 50), 2.0);
  EXPECT_DOUBLE_EQ(Percentile({1, 2, 3, 4}, 50), 2.5);
}

TEST(FftTest, RoundTrip) {
  const Waveform g = Gaussian(1000, 3);
  const auto spec = RealFft(g.samples);
  const auto back = InverseRealFft(spec, g.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], g.samples[i], 1e-12);
}

TEST(FftTest, SineLandsInItsBin) {
  std::vector<double> x(256);
  for (int i = 0; i < 256; ++i) x[i] = std::cos(2 * std::numbers::pi * 8 * i / 256.0);
  const auto spec = RealFft(x);
  EXPECT_NEAR(std::abs(spec[8]), 128.0, 1e-9);
  EXPECT_NEAR(std::abs(spec[9]), 0.0, 1e-9);
}

TEST(ErbTest, Oracles) {
  EXPECT_NEAR(ErbNumber(87.0), 3.0, 0.05);
  EXPECT_DOUBLE_EQ(ErbNumber(0.0), 0.0);
  EXPECT_NEAR(ErbBandwidth(1000.0), 132.6, 0.05);
  EXPECT_NEAR(ErbNumber(1000.0), 15.62, 0.01);
  EXPECT_NEAR(ErbNumberToHz(ErbNumber(1234.5)), 1234.5, 1e-9);
}

TEST(ErbTest, SpacedCentersAreUniformOnErbScale) {
  const auto c = ErbSpacedCenters(45.8, 0.5, 64);
  ASSERT_EQ(c.size(), 64u);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_GT(c[i], c[i - 1]);
    EXPECT_NEAR(ErbNumber(c[i]) - ErbNumber(c[i - 1]), 0.5, 1e-6);
  }
}

TEST(RngTest, DeriveSeedSeparatesTagsAndIndices) {
  EXPECT_EQ(DeriveSeed(1, "noise/white", 3), DeriveSeed(1, "noise/white", 3));
  EXPECT_NE(DeriveSeed(1, "noise/white", 3), DeriveSeed(1, "noise/white", 4));
  EXPECT_NE(DeriveSeed(1, "noise/white", 3), DeriveSeed(1, "noise/bump", 3));
  EXPECT_NE(DeriveSeed(1, "noise/white", 3), DeriveSeed(2, "noise/white", 3));
}

TEST(FilterTest, ButterworthHalfPowerAtCutoff) {
  const SosFilter lp = ButterworthLowpass(5, 770.0, 16000.0);
  EXPECT_NEAR(lp.Magnitude(770.0, 16000.0), 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(lp.Magnitude(0.0, 16000.0), 1.0, 1e-9);
}

TEST(FilterTest, GammatonePeaksAtCenter) {
  const GammatoneFilter g(1000.0, 16000.0);
  EXPECT_NEAR(g.Magnitude(1000.0), 1.0, 0.01);
  EXPECT_LT(g.Magnitude(1500.0), 0.5);
}

TEST(WavTest, FloatRoundTrip) {
  Waveform w = Scale(Gaussian(2000, 4), 0.1);
  const auto path = std::filesystem::temp_directory_path() / "revcorr_wav_test.wav";
  WriteWav(path, w);
  const Waveform r = ReadWav(path);
  ASSERT_EQ(r.size(), w.size());
  EXPECT_EQ(r.fs, w.fs);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(r.samples[i], w.samples[i], 1e-7);
  std::filesystem::remove(path);
}

TEST(ManifestTest, Sha256OfKnownString) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ManifestTest, AtomicWriteReplacesContents) {
  const auto path = std::filesystem::temp_directory_path() / "revcorr_atomic_test.txt";
  WriteFileAtomic(path, "first");
  WriteFileAtomic(path, "second");
  EXPECT_EQ(ReadFile(path), "second");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace revcorr
