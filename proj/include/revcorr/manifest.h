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

#ifndef REVCORR_MANIFEST_H_
#define REVCORR_MANIFEST_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace revcorr {

// Writes `contents` to a temporary sibling of `path` and renames it into
// place, so a reader never sees a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

std::string ReadFile(const std::filesystem::path& path);

// Parses a complete decimal number, subnormals included. Throws
// std::invalid_argument on trailing characters or malformed input.
double ParseNumber(std::string_view text);

std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path& path);

struct ManifestEntry {
  std::string file;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

// Checksummed listing of a run directory's artifacts.
struct RunManifest {
  std::string config_hash;
  std::vector<ManifestEntry> entries;

  // Hashes every regular file under `dir` except the manifest itself and
  // the timing log, sorted by relative path.
  static RunManifest Scan(const std::filesystem::path& dir,
                          std::string config_hash);
  std::string ToCsv() const;
};

inline constexpr char kRunManifestName[] = "run_manifest.csv";
inline constexpr char kTimingLogName[] = "timing.csv";

}  // namespace revcorr

#endif  // REVCORR_MANIFEST_H_
