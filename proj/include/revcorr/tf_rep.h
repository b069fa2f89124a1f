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

#ifndef REVCORR_TF_REP_H_
#define REVCORR_TF_REP_H_

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "revcorr/filters.h"
#include "revcorr/signal.h"

namespace revcorr {

inline constexpr int kTfFrames = 86;
inline constexpr int kTfBands = 64;
inline constexpr int kTfSize = kTfFrames * kTfBands;  // 5504
inline constexpr double kTfFrameStep = 0.01;
inline constexpr double kTfFirstBandHz = 45.8;
inline constexpr double kTfBandSpacingErb = 0.5;
inline constexpr double kTfEnvelopeCutoffHz = 770.0;
inline constexpr int kTfEnvelopeOrder = 5;

// Band centres of the T-F representation: 64 bands at 0.5-ERB spacing
// from 45.8 Hz.
std::vector<double> TfBandCenters();

// Envelope amplitude per 10-ms frame (rows) and ERB band (columns).
struct TfMatrix {
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(kTfFrames, kTfBands);
  double time_step = kTfFrameStep;
  std::vector<double> band_centers_hz = TfBandCenters();
};

// Gammatone filterbank -> |band signal| -> 5th-order 770-Hz Butterworth
// low-pass -> mean per 10-ms frame. The filters are designed once.
class TfAnalyzer {
 public:
  explicit TfAnalyzer(double fs = kDefaultFs);

  // Throws std::invalid_argument unless w is 0.86 s at the analyser's fs.
  TfMatrix Analyze(const Waveform& w) const;

 private:
  double fs_;
  std::vector<GammatoneFilter> bands_;
  SosFilter envelope_lowpass_;
};

TfMatrix TfRepresentation(const Waveform& w);

// Column-major vectorisation (time index fastest): element (frame i,
// band j) goes to index i + 86 j.
Eigen::VectorXd Vectorize(const TfMatrix& m);
// Throws std::invalid_argument unless v has 5504 entries.
TfMatrix Devectorize(const Eigen::VectorXd& v);

// 86 rows x 64 columns with a header line of band centres.
void WriteTfCsv(const std::filesystem::path& path, const TfMatrix& m);

}  // namespace revcorr

#endif  // REVCORR_TF_REP_H_
