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

#include "revcorr/wav.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "revcorr/manifest.h"

namespace revcorr {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
void Put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T Get(const std::string& data, std::size_t offset) {
  if (offset + sizeof(T) > data.size()) {
    throw std::runtime_error("truncated WAV file");
  }
  T value;
  std::memcpy(&value, data.data() + offset, sizeof(T));
  return value;
}

}  // namespace

void WriteWav(const std::filesystem::path& path, const Waveform& w) {
  const auto n = static_cast<std::uint32_t>(w.size());
  const std::uint32_t data_bytes = n * 4;
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  Put<std::uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  Put<std::uint32_t>(out, 16);
  Put<std::uint16_t>(out, kFormatFloat);
  Put<std::uint16_t>(out, 1);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(w.fs));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(w.fs) * 4);
  Put<std::uint16_t>(out, 4);
  Put<std::uint16_t>(out, 32);
  out += "data";
  Put<std::uint32_t>(out, data_bytes);
  for (double v : w.samples) Put<float>(out, static_cast<float>(v));
  WriteFileAtomic(path, out);
}

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();
  if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 ||
      data.compare(8, 4, "WAVE") != 0) {
    throw std::runtime_error(path.string() + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::string id = data.substr(pos, 4);
    const auto size = Get<std::uint32_t>(data, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      format = Get<std::uint16_t>(data, body);
      channels = Get<std::uint16_t>(data, body + 2);
      rate = Get<std::uint32_t>(data, body + 4);
      bits = Get<std::uint16_t>(data, body + 14);
      if (format == 0xFFFE && size >= 40) {
        // WAVE_FORMAT_EXTENSIBLE: the sub-format GUID starts with the tag.
        format = Get<std::uint16_t>(data, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw std::runtime_error("data chunk before fmt chunk");
      if (channels != 1) throw std::runtime_error("only mono WAV is supported");
      if (body + size > data.size()) throw std::runtime_error("truncated WAV file");
      Waveform w;
      w.fs = rate;
      if (format == kFormatFloat && bits == 32) {
        w.samples.resize(size / 4);
        for (std::size_t i = 0; i < w.samples.size(); ++i) {
          w.samples[i] = Get<float>(data, body + 4 * i);
        }
      } else if (format == kFormatPcm && bits == 16) {
        w.samples.resize(size / 2);
        for (std::size_t i = 0; i < w.samples.size(); ++i) {
          w.samples[i] = Get<std::int16_t>(data, body + 2 * i) / 32768.0;
        }
      } else {
        throw std::runtime_error("unsupported WAV encoding (need float32 or pcm16)");
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw std::runtime_error(path.string() + ": no data chunk");
}

}  // namespace revcorr
