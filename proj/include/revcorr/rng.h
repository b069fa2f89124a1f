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

#ifndef REVCORR_RNG_H_
#define REVCORR_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace revcorr {

using Rng = std::mt19937_64;

// SplitMix64 finaliser. Bijective on 64-bit words.
std::uint64_t Mix64(std::uint64_t x);

// Sub-seed for stream `tag`, element `index`, derived from `master`.
//
// seed = Mix64(Mix64(master ^ Fnv1a(tag)) + index * golden)
//
// Every random quantity in a pipeline run is drawn from a generator seeded
// this way, so a single master seed fixes the whole run and streams with
// different tags never share state.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view tag,
                         std::uint64_t index = 0);

// Uniform draw in [lo, hi).
double Uniform(Rng& rng, double lo, double hi);

}  // namespace revcorr

#endif  // REVCORR_RNG_H_
