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

#include "revcorr/fft.h"

#include <unsupported/Eigen/FFT>

namespace revcorr {
namespace {

// Eigen::FFT caches plans per size and is not safe to share across threads.
Eigen::FFT<double>& Engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace

std::vector<Complex> RealFft(std::span<const double> x) {
  auto& fft = Engine();
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> in(x.begin(), x.end());
  std::vector<Complex> out;
  fft.fwd(out, in);
  out.resize(x.size() / 2 + 1);
  return out;
}

std::vector<double> InverseRealFft(std::span<const Complex> half_spectrum,
                                   std::size_t n) {
  auto& fft = Engine();
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<Complex> in(half_spectrum.begin(), half_spectrum.end());
  std::vector<double> out;
  fft.inv(out, in, static_cast<Eigen::Index>(n));
  return out;
}

std::vector<Complex> Fft(std::span<const Complex> x) {
  auto& fft = Engine();
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> out;
  fft.fwd(out, in);
  return out;
}

std::vector<Complex> InverseFft(std::span<const Complex> x) {
  auto& fft = Engine();
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> out;
  fft.inv(out, in);
  return out;
}

}  // namespace revcorr
