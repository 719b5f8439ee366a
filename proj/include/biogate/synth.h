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


#ifndef BIOGATE_SYNTH_H_
#define BIOGATE_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "biogate/dataset.h"
#include "biogate/image.h"
#include "biogate/random.h"
#include "biogate/wav.h"

namespace biogate {

// A synthetic talker: a pitch range and a few vowel-like formant sets.
struct VoiceProfile {
  double f0 = 120.0;
  std::vector<std::vector<double>> vowels;  // formant frequencies in Hz
  double bandwidth = 100.0;                 // resonance width in Hz
};

std::vector<VoiceProfile> MakeVoiceProfiles(int speakers, uint64_t seed);

// Syllables drawn from the profile's vowels, separated by near-silent gaps,
// with pitch drift and a low noise floor.
AudioClip SynthesizeUtterance(const VoiceProfile& profile, Rng& rng,
                              double seconds = 2.0, int sample_rate = 16000);

struct FaceProfile {
  std::vector<double> background, skin, hair, eyes, mouth;  // RGB
  double face_rx = 0.3, face_ry = 0.38;  // fractions of the image size
  double eye_y = 0.42, eye_dx = 0.12, eye_r = 0.05;
  double mouth_y = 0.68, mouth_w = 0.14;
  double hair_line = 0.25;
  bool glasses = false;
};

std::vector<FaceProfile> MakeFaceProfiles(int identities, uint64_t seed);

// One square photo of the identity with pose, lighting and sensor jitter.
Image RenderFace(const FaceProfile& profile, Rng& rng, int64_t size);

struct VoiceCorpusConfig {
  int speakers = 8;
  int train_per_speaker = 16;
  int valid_per_speaker = 4;
  int test_per_speaker = 4;
  double seconds = 2.0;
  int sample_rate = 16000;
  uint64_t seed = 1;
};

struct FaceCorpusConfig {
  int identities = 5;
  int train_per_identity = 24;
  int valid_per_identity = 6;
  int test_per_identity = 10;
  int64_t size = 56;
  uint64_t seed = 1;
};

// In-memory corpora; entry paths are the file names the writers use.
struct VoiceCorpus {
  DatasetManifest manifest;
  std::vector<AudioClip> clips;
};
struct FaceCorpus {
  DatasetManifest manifest;
  std::vector<Image> images;
};

VoiceCorpus MakeVoiceCorpus(const VoiceCorpusConfig& config);
FaceCorpus MakeFaceCorpus(const FaceCorpusConfig& config);

// Writes the files plus manifest.tsv into `dir`.
void WriteVoiceCorpus(const std::string& dir, const VoiceCorpus& corpus);
void WriteFaceCorpus(const std::string& dir, const FaceCorpus& corpus);

}  // namespace biogate

#endif  // BIOGATE_SYNTH_H_
