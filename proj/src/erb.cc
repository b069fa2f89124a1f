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

#include "revcorr/erb.h"

#include <cmath>
#include <stdexcept>

namespace revcorr {

double ErbNumber(double f_hz) {
  if (f_hz < 0.0) throw std::invalid_argument("negative frequency");
  return 21.4 * std::log10(4.37 * f_hz / 1000.0 + 1.0);
}

double ErbBandwidth(double f_hz) {
  if (f_hz < 0.0) throw std::invalid_argument("negative frequency");
  return 24.7 * (4.37 * f_hz / 1000.0 + 1.0);
}

double ErbNumberToHz(double erb_n) {
  return (std::pow(10.0, erb_n / 21.4) - 1.0) / 4.37 * 1000.0;
}

std::vector<double> ErbSpacedCenters(double first_hz, double spacing, int count) {
  std::vector<double> out(count);
  const double first = ErbNumber(first_hz);
  for (int k = 0; k < count; ++k) out[k] = ErbNumberToHz(first + spacing * k);
  return out;
}

}  // namespace revcorr
