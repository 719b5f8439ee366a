// Copyright (c) 2026 The biogate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "biogate/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "biogate/error.h"

namespace biogate {

namespace {

constexpr uint16_t kFormatPcm = 1;

uint16_t ReadU16(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint16_t>(b[at] | (b[at + 1] << 8));
}

uint32_t ReadU32(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint32_t>(b[at]) | (static_cast<uint32_t>(b[at + 1]) << 8) |
         (static_cast<uint32_t>(b[at + 2]) << 16) |
         (static_cast<uint32_t>(b[at + 3]) << 24);
}

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

bool TagIs(std::span<const uint8_t> b, size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

AudioClip ParseWav(std::span<const uint8_t> bytes) {
  Require(bytes.size() >= 12, ErrorCode::kFormat, "wav: file shorter than RIFF header");
  Require(TagIs(bytes, 0, "RIFF"), ErrorCode::kFormat, "wav: missing RIFF magic");
  Require(TagIs(bytes, 8, "WAVE"), ErrorCode::kFormat, "wav: missing WAVE form type");

  bool have_fmt = false;
  int sample_rate = 0;
  std::span<const uint8_t> data;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t size = ReadU32(bytes, pos + 4);
    const size_t body = pos + 8;
    Require(size <= bytes.size() - body, ErrorCode::kFormat,
            "wav: chunk extends past end of file");
    if (TagIs(bytes, pos, "fmt ")) {
      Require(size >= 16, ErrorCode::kFormat, "wav: fmt chunk too small");
      const uint16_t format = ReadU16(bytes, body);
      const uint16_t channels = ReadU16(bytes, body + 2);
      const uint32_t rate = ReadU32(bytes, body + 4);
      const uint16_t bits = ReadU16(bytes, body + 14);
      Require(format == kFormatPcm, ErrorCode::kUnsupported,
              "wav: only PCM encoding is supported (format tag " +
                  std::to_string(format) + ")");
      Require(channels == 1, ErrorCode::kUnsupported,
              "wav: only mono is supported (" + std::to_string(channels) +
                  " channels)");
      Require(bits == 16, ErrorCode::kUnsupported,
              "wav: only 16-bit samples are supported (" + std::to_string(bits) +
                  " bits)");
      Require(rate > 0 && rate <= 1'000'000, ErrorCode::kFormat,
              "wav: invalid sample rate");
      sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (TagIs(bytes, pos, "data")) {
      Require(!have_data, ErrorCode::kFormat, "wav: duplicate data chunk");
      data = bytes.subspan(body, size);
      have_data = true;
    }
    // Chunks are word aligned.
    pos = body + size + (size & 1u);
  }
  Require(have_fmt, ErrorCode::kFormat, "wav: missing fmt chunk");
  Require(have_data, ErrorCode::kFormat, "wav: missing data chunk");
  Require(data.size() % 2 == 0, ErrorCode::kFormat,
          "wav: data chunk holds a partial sample");
  Require(!data.empty(), ErrorCode::kFormat, "wav: data chunk is empty");

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(data.size() / 2);
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    const auto raw = static_cast<int16_t>(ReadU16(data, 2 * i));
    clip.samples[i] = static_cast<double>(raw) / 32768.0;
  }
  return clip;
}

std::vector<uint8_t> EncodeWav(const AudioClip& clip) {
  Require(clip.sample_rate > 0, ErrorCode::kContract, "wav: sample rate must be positive");
  const auto data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(clip.sample_rate));
  PutU32(out, static_cast<uint32_t>(clip.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, data_bytes);
  for (double s : clip.samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<int16_t>(std::lround(clamped * 32767.0));
    PutU16(out, static_cast<uint16_t>(q));
  }
  return out;
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + path);
}

AudioClip ReadWavFile(const std::string& path) {
  return ParseWav(ReadFileBytes(path));
}

void WriteWavFile(const std::string& path, const AudioClip& clip) {
  WriteFileBytes(path, EncodeWav(clip));
}

}  // namespace biogate
