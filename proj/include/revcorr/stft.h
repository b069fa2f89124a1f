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

#ifndef REVCORR_STFT_H_
#define REVCORR_STFT_H_

#include <Eigen/Core>
#include <complex>
#include <span>
#include <vector>

namespace revcorr {

// Complex spectrogram: rows are frequency bins (0..frame/2), columns are
// frames.
using Spectrogram = Eigen::MatrixXcd;

// Short-time Fourier transform with a periodic Hann window and centred
// frames (the signal is zero-padded by frame/2 on both sides), plus its
// weighted overlap-add inverse.
class Stft {
 public:
  Stft(int frame_length = 512, int hop = 128);

  Spectrogram Forward(std::span<const double> x) const;
  // Inverse for a signal of `length` samples; least-squares consistent
  // with Forward.
  std::vector<double> Inverse(const Spectrogram& spec, std::size_t length) const;

  int NumFrames(std::size_t length) const;
  int frame_length() const { return frame_length_; }
  int hop() const { return hop_; }
  int num_bins() const { return frame_length_ / 2 + 1; }
  // Centre time of frame m, relative to the first signal sample.
  double FrameTime(int m, double fs) const { return m * hop_ / fs; }

 private:
  int frame_length_;
  int hop_;
  std::vector<double> window_;
};

}  // namespace revcorr

#endif  // REVCORR_STFT_H_
