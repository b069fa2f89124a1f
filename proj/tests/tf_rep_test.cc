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
#include <numbers>

#include "gtest/gtest.h"
#include "revcorr/erb.h"
#include "revcorr/noisegen.h"
#include "revcorr/tf_rep.h"

namespace revcorr {
namespace {

Waveform Tone(double f_hz) {
  Waveform w;
  w.samples.resize(kStimulusLength);
  for (int i = 0; i < kStimulusLength; ++i) {
    w.samples[i] = 0.01 * std::sin(2.0 * std::numbers::pi * f_hz * i / kDefaultFs);
  }
  return w;
}

TEST(TfRepTest, Dimensions) {
  const TfMatrix m = TfRepresentation(GenerateNoise(NoiseSpec::Default(NoiseKind::kWhite), 1).waveform);
  EXPECT_EQ(m.values.rows(), 86);
  EXPECT_EQ(m.values.cols(), 64);
  EXPECT_EQ(kTfSize, 5504);
  EXPECT_EQ(static_cast<int>(std::floor(kStimulusDuration / kTfFrameStep + 1e-9)), kTfFrames);
}

TEST(TfRepTest, SilenceGivesZeros) {
  Waveform w;
  w.samples.assign(kStimulusLength, 0.0);
  EXPECT_EQ(TfRepresentation(w).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TfRepTest, ToneLandsInItsBand) {
  const auto centers = TfBandCenters();
  for (int k : {8, 20, 32, 45, 55}) {
    const TfMatrix m = TfRepresentation(Tone(centers[k]));
    Eigen::Index arg = 0;
    m.values.colwise().mean().maxCoeff(&arg);
    EXPECT_EQ(arg, k) << "band " << k;
  }
}

TEST(TfRepTest, ScalingIsExact) {
  const Waveform w = GenerateNoise(NoiseSpec::Default(NoiseKind::kWhite), 3).waveform;
  const TfMatrix a = TfRepresentation(w);
  const TfMatrix b = TfRepresentation(Scale(w, 2.0));
  EXPECT_LT((b.values - 2.0 * a.values).cwiseAbs().maxCoeff(), 1e-12 * a.values.maxCoeff());
}

TEST(TfRepTest, BandCentersAreHalfErbApart) {
  const auto c = TfBandCenters();
  ASSERT_EQ(c.size(), 64u);
  EXPECT_NEAR(c.front(), 45.8, 1e-9);
  EXPECT_NEAR(ErbNumber(c.front()), 1.69, 0.01);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_GT(c[i], c[i - 1]);
    EXPECT_NEAR(ErbNumber(c[i]) - ErbNumber(c[i - 1]), 0.5, 1e-6);
  }
}

TEST(TfRepTest, VectorLayoutIsTimeFastest) {
  TfMatrix m;
  m.values = Eigen::MatrixXd::Random(86, 64);
  const Eigen::VectorXd v = Vectorize(m);
  ASSERT_EQ(v.size(), 5504);
  for (int i : {0, 5, 85}) {
    for (int j : {0, 7, 63}) EXPECT_EQ(v[i + 86 * j], m.values(i, j));
  }
  EXPECT_EQ(Devectorize(v).values, m.values);
  EXPECT_THROW(Devectorize(Eigen::VectorXd::Zero(10)), std::invalid_argument);
}

TEST(TfRepTest, RejectsWrongLength) {
  Waveform w;
  w.samples.assign(1000, 0.0);
  EXPECT_THROW(TfRepresentation(w), std::invalid_argument);
}

}  // namespace
}  // namespace revcorr
