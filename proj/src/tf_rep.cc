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

#include "revcorr/tf_rep.h"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "revcorr/erb.h"
#include "revcorr/manifest.h"

namespace revcorr {

std::vector<double> TfBandCenters() {
  return ErbSpacedCenters(kTfFirstBandHz, kTfBandSpacingErb, kTfBands);
}

TfAnalyzer::TfAnalyzer(double fs)
    : fs_(fs), envelope_lowpass_(ButterworthLowpass(kTfEnvelopeOrder, kTfEnvelopeCutoffHz, fs)) {
  for (double fc : TfBandCenters()) bands_.emplace_back(fc, fs);
}

TfMatrix TfAnalyzer::Analyze(const Waveform& w) const {
  if (w.fs != fs_ || w.size() != static_cast<std::size_t>(std::lround(kStimulusDuration * fs_))) {
    throw std::invalid_argument("T-F analysis expects 0.86 s at 16 kHz");
  }
  const auto frame = static_cast<std::size_t>(std::lround(kTfFrameStep * fs_));
  TfMatrix m;
  SosFilter lowpass = envelope_lowpass_;
  for (int b = 0; b < kTfBands; ++b) {
    std::vector<double> band = bands_[b].Process(w.samples);
    for (double& v : band) v = std::abs(v);
    lowpass.Reset();
    lowpass.ProcessInPlace(band);
    for (int i = 0; i < kTfFrames; ++i) {
      double acc = 0.0;
      for (std::size_t n = i * frame; n < (i + 1) * frame; ++n) acc += band[n];
      m.values(i, b) = acc / static_cast<double>(frame);
    }
  }
  return m;
}

TfMatrix TfRepresentation(const Waveform& w) {
  static const TfAnalyzer analyzer;
  return analyzer.Analyze(w);
}

Eigen::VectorXd Vectorize(const TfMatrix& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.values.data(), m.values.size());
}

TfMatrix Devectorize(const Eigen::VectorXd& v) {
  if (v.size() != kTfSize) {
    throw std::invalid_argument("T-F vector must have 5504 entries");
  }
  TfMatrix m;
  m.values = Eigen::Map<const Eigen::MatrixXd>(v.data(), kTfFrames, kTfBands);
  return m;
}

void WriteTfCsv(const std::filesystem::path& path, const TfMatrix& m) {
  std::ostringstream out;
  out << std::setprecision(10);
  for (std::size_t b = 0; b < m.band_centers_hz.size(); ++b) {
    out << (b ? "," : "") << m.band_centers_hz[b];
  }
  out << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      out << (j ? "," : "") << m.values(i, j);
    }
    out << "\n";
  }
  WriteFileAtomic(path, out.str());
}

}  // namespace revcorr
