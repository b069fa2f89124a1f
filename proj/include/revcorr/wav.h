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

#ifndef REVCORR_WAV_H_
#define REVCORR_WAV_H_

#include <filesystem>

#include "revcorr/signal.h"

namespace revcorr {

// Writes a mono 32-bit IEEE-float WAV file.
void WriteWav(const std::filesystem::path& path, const Waveform& w);

// Reads a mono WAV file, either 32-bit float or 16-bit PCM (scaled to
// [-1, 1)). Throws std::runtime_error on anything else.
Waveform ReadWav(const std::filesystem::path& path);

}  // namespace revcorr

#endif  // REVCORR_WAV_H_
