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

#include "revcorr/stft.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "revcorr/fft.h"

namespace revcorr {

Stft::Stft(int frame_length, int hop)
    : frame_length_(frame_length), hop_(hop), window_(frame_length) {
  if (frame_length < 2 || frame_length % 2 != 0 || hop < 1 || hop > frame_length) {
    throw std::invalid_argument("bad STFT geometry");
  }
  for (int i = 0; i < frame_length; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame_length);
  }
}

int Stft::NumFrames(std::size_t length) const {
  // Frames start every hop in the padded signal and must cover it.
  const std::size_t padded = length + static_cast<std::size_t>(frame_length_);
  const std::size_t span = padded - static_cast<std::size_t>(frame_length_);
  return static_cast<int>((span + hop_ - 1) / hop_) + 1;
}

Spectrogram Stft::Forward(std::span<const double> x) const {
  const int frames = NumFrames(x.size());
  const int half = frame_length_ / 2;
  Spectrogram spec(num_bins(), frames);
  std::vector<double> buf(frame_length_);
  for (int m = 0; m < frames; ++m) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(m) * hop_ - half;
    for (int i = 0; i < frame_length_; ++i) {
      const std::ptrdiff_t idx = start + i;
      const double v = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(x.size()))
                           ? x[static_cast<std::size_t>(idx)]
                           : 0.0;
      buf[i] = v * window_[i];
    }
    const std::vector<Complex> bins = RealFft(buf);
    for (int k = 0; k < num_bins(); ++k) spec(k, m) = bins[k];
  }
  return spec;
}

std::vector<double> Stft::Inverse(const Spectrogram& spec, std::size_t length) const {
  const int frames = static_cast<int>(spec.cols());
  const int half = frame_length_ / 2;
  const std::size_t padded =
      static_cast<std::size_t>(frames - 1) * hop_ + frame_length_;
  std::vector<double> acc(padded, 0.0), norm(padded, 0.0);
  std::vector<Complex> bins(num_bins());
  for (int m = 0; m < frames; ++m) {
    for (int k = 0; k < num_bins(); ++k) bins[k] = spec(k, m);
    const std::vector<double> frame = InverseRealFft(bins, frame_length_);
    const std::size_t start = static_cast<std::size_t>(m) * hop_;
    for (int i = 0; i < frame_length_; ++i) {
      acc[start + i] += frame[i] * window_[i];
      norm[start + i] += window_[i] * window_[i];
    }
  }
  std::vector<double> out(length, 0.0);
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t p = n + static_cast<std::size_t>(half);
    if (p < padded && norm[p] > 1e-12) out[n] = acc[p] / norm[p];
  }
  return out;
}

}  // namespace revcorr
