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

#ifndef REVCORR_FFT_H_
#define REVCORR_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace revcorr {

using Complex = std::complex<double>;

// Forward transform of a real sequence; returns the n/2 + 1 non-negative
// frequency bins, unnormalised.
std::vector<Complex> RealFft(std::span<const double> x);

// Inverse of RealFft for a signal of length n. Includes the 1/n factor.
std::vector<double> InverseRealFft(std::span<const Complex> half_spectrum,
                                   std::size_t n);

// Full complex transforms. Inverse includes the 1/n factor.
std::vector<Complex> Fft(std::span<const Complex> x);
std::vector<Complex> InverseFft(std::span<const Complex> x);

}  // namespace revcorr

#endif  // REVCORR_FFT_H_
