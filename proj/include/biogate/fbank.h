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

#ifndef BIOGATE_FBANK_H_
#define BIOGATE_FBANK_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "biogate/tensor.h"
#include "biogate/wav.h"

namespace biogate {

struct FeatureConfig {
  double window_s = 0.025;
  double hop_s = 0.010;
  int n_fft = 512;
  int n_mels = 64;
  double vad_threshold_db = 30.0;
  // Energies are clamped to this before the log.
  double log_floor = 1e-30;
  bool apply_vad = true;
  bool normalize = true;
};

// Overlapping analysis frames, row-major [count, length].
struct Frames {
  int64_t count = 0;
  int64_t length = 0;
  std::vector<double> samples;

  std::span<const double> frame(int64_t i) const {
    return std::span<const double>(samples).subspan(
        static_cast<size_t>(i * length), static_cast<size_t>(length));
  }
};

// T x D log-mel filterbank matrix, row-major (one row per frame).
struct FeatureMatrix {
  int64_t frames = 0;
  int64_t dim = 0;
  double frame_hop_s = 0.0;
  double window_s = 0.0;
  std::vector<double> values;

  double at(int64_t t, int64_t d) const { return values[t * dim + d]; }
  std::span<const double> row(int64_t t) const {
    return std::span<const double>(values).subspan(static_cast<size_t>(t * dim),
                                                   static_cast<size_t>(dim));
  }
  // Frames [start, start + length).
  FeatureMatrix Slice(int64_t start, int64_t length) const;
  // [1, dim, frames] network input (frequency rows, time columns).
  Tensor ToTensor() const;
};

double HzToMel(double hz);
double MelToHz(double mel);

// Frame count 1 + floor((N - W) / H) with W and H rounded to samples.
// Throws kTooShort when the clip holds fewer than W samples.
Frames FrameSignal(const AudioClip& clip, double window_s, double hop_s);

// Per-frame energy 10*log10(sum x^2); -inf for an all-zero frame.
std::vector<double> FrameLogEnergyDb(const Frames& frames);

// Keeps frames whose log-energy is within threshold_db of the loudest frame.
// Throws kEmptyVoice when every frame is silent.
std::vector<bool> VadFilter(const Frames& frames, double threshold_db = 30.0);

// [n_mels, n_fft/2 + 1] triangular weights, centres evenly spaced on the mel
// scale between 0 Hz and sample_rate / 2.
std::vector<double> MelFilterbank(int n_mels, int n_fft, int sample_rate);

FeatureMatrix ExtractFbank(const AudioClip& clip, const FeatureConfig& config = {});

// Text dump: header `fbank <D> <T>` then one frame per line.
void WriteFeatureDump(std::ostream& out, const FeatureMatrix& features);
FeatureMatrix ReadFeatureDump(std::istream& in);

}  // namespace biogate

#endif  // BIOGATE_FBANK_H_
