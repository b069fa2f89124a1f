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

#ifndef REVCORR_ERB_H_
#define REVCORR_ERB_H_

#include <vector>

namespace revcorr {

// Glasberg & Moore (1990) ERB-number scale and bandwidth.
// Both throw std::invalid_argument for negative frequencies.
double ErbNumber(double f_hz);     // 21.4 log10(4.37 f / 1000 + 1)
double ErbBandwidth(double f_hz);  // 24.7 (4.37 f / 1000 + 1)
double ErbNumberToHz(double erb_n);

// `count` centre frequencies spaced `spacing` ERB_N apart starting at
// `first_hz`.
std::vector<double> ErbSpacedCenters(double first_hz, double spacing, int count);

}  // namespace revcorr

#endif  // REVCORR_ERB_H_
