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


#ifndef BIOGATE_TRAINING_H_
#define BIOGATE_TRAINING_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "biogate/face_net.h"
#include "biogate/fbank.h"
#include "biogate/image.h"
#include "biogate/optim.h"
#include "biogate/random.h"
#include "biogate/speaker_net.h"

namespace biogate {

enum class Mining { kSemiHard, kAll };

struct TrainConfig {
  int64_t minibatch = 32;
  // Speakers per batch; each contributes minibatch / speakers_per_batch chunks.
  int64_t speakers_per_batch = 8;
  double margin_alpha = 0.1;
  int epochs = 10;
  // Stops early once this many optimizer steps have been attempted; 0 = off.
  int64_t max_steps = 0;
  uint64_t seed = 1;
  AdamHyper adam;
  int64_t chunk_frames = 160;
  Mining mining = Mining::kSemiHard;

  // Throws kContract on minibatch < 3, alpha <= 0 or a bad batch split.
  void Validate() const;
};

struct Triplet {
  int64_t anchor = 0;
  int64_t positive = 0;
  int64_t negative = 0;

  bool operator==(const Triplet&) const = default;
};

// One triplet per ordered (anchor, positive) pair of equal labels. Semi-hard
// picks uniformly among negatives with cos(a, n) > cos(a, p) - alpha and
// falls back to the most similar negative; kAll emits every negative.
std::vector<Triplet> SampleTriplets(std::span<const Embedding> embeddings,
                                    std::span<const int64_t> labels, Mining strategy,
                                    double alpha, Rng& rng);

struct LabeledFeatures {
  FeatureMatrix features;
  int64_t label = 0;
};

struct SpeakerEpoch {
  int epoch = 0;
  int64_t steps = 0;          // cumulative optimizer steps attempted
  int64_t skipped_steps = 0;  // in this epoch: no triplet or zero loss
  double mean_loss = 0.0;
  double valid_eer = 0.0;
};

// Embeds the centre chunk of every utterance and scores all pairs.
double ValidationEer(const SpeakerNet& model, std::span<const LabeledFeatures> data,
                     int64_t chunk_frames);

// One epoch is one pass over the training utterances. If a step fails (for
// example a non-finite loss) the model is restored to the last completed
// epoch and the error rethrown.
std::vector<SpeakerEpoch> TrainSpeaker(
    SpeakerNet& model, std::span<const LabeledFeatures> train,
    std::span<const LabeledFeatures> valid, const TrainConfig& config,
    const std::function<void(const SpeakerEpoch&)>& on_epoch = nullptr);

struct FaceTrainConfig {
  int64_t minibatch = 16;
  int epochs = 20;
  int64_t max_steps = 0;
  uint64_t seed = 1;
  AdamHyper adam;
  // Augmented copies added per training image (originals kept).
  int augment_multiplicity = 0;

  void Validate() const;
};

struct LabeledImage {
  Image image;
  int64_t label = 0;
};

struct FaceEpoch {
  int epoch = 0;
  int64_t steps = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double valid_loss = 0.0;
  double valid_accuracy = 0.0;
};

// n images with multiplicity m -> n (m + 1) entries, originals first.
std::vector<LabeledImage> AugmentDataset(std::span<const LabeledImage> images,
                                         int multiplicity, uint64_t seed);

struct FaceEvaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<int64_t> predictions;
};

FaceEvaluation EvaluateFace(const FaceNet& model, std::span<const LabeledImage> data);

std::vector<FaceEpoch> TrainFace(
    FaceNet& model, std::span<const LabeledImage> train,
    std::span<const LabeledImage> valid, const FaceTrainConfig& config,
    const std::function<void(const FaceEpoch&)>& on_epoch = nullptr);

// Tab-separated, one row per epoch, with a header line.
void WriteSpeakerHistory(std::ostream& out, std::span<const SpeakerEpoch> history);
void WriteFaceHistory(std::ostream& out, std::span<const FaceEpoch> history);

}  // namespace biogate

#endif  // BIOGATE_TRAINING_H_
