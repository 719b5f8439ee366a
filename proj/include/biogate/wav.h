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

#ifndef BIOGATE_WAV_H_
#define BIOGATE_WAV_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace biogate {

// Mono utterance with samples in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Decodes a RIFF/WAVE container holding 16-bit PCM mono. Unknown chunks are
// skipped; the "data" chunk must be present and fully contained.
AudioClip ParseWav(std::span<const uint8_t> bytes);

// Encodes as canonical 44-byte-header PCM16 mono. Samples are clamped to
// [-1, 1] and quantized with round-to-nearest at scale 32767.
std::vector<uint8_t> EncodeWav(const AudioClip& clip);

AudioClip ReadWavFile(const std::string& path);
void WriteWavFile(const std::string& path, const AudioClip& clip);

// Whole-file helpers shared by the codecs.
std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace biogate

#endif  // BIOGATE_WAV_H_
