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


#include "biogate/training.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "biogate/error.h"
#include "biogate/metrics.h"
#include "biogate/ops.h"

namespace biogate {

namespace {

double Cosine(const Embedding& a, const Embedding& b) {
  double ab = 0, aa = 0, bb = 0;
  for (size_t i = 0; i < a.dim(); ++i) {
    ab += a.values[i] * b.values[i];
    aa += a.values[i] * a.values[i];
    bb += b.values[i] * b.values[i];
  }
  return ab / std::sqrt(aa * bb);
}

FeatureMatrix Chunk(const FeatureMatrix& f, int64_t chunk_frames, int64_t offset) {
  if (f.frames <= chunk_frames) return f;
  return f.Slice(offset, chunk_frames);
}

Embedding ToEmbedding(const Tensor& t) {
  return Embedding{{t.data().begin(), t.data().end()}};
}

}  // namespace

void TrainConfig::Validate() const {
  Require(minibatch >= 3, ErrorCode::kContract, "triplet minibatch must be at least 3");
  Require(margin_alpha > 0.0, ErrorCode::kContract, "triplet margin must be positive");
  Require(speakers_per_batch >= 2 && minibatch % speakers_per_batch == 0 &&
              minibatch / speakers_per_batch >= 2,
          ErrorCode::kContract,
          "minibatch must split into at least 2 speakers x 2 chunks");
  Require(epochs >= 1 && chunk_frames >= 1 && max_steps >= 0, ErrorCode::kContract,
          "epochs and chunk_frames must be positive");
}

void FaceTrainConfig::Validate() const {
  Require(minibatch >= 1 && epochs >= 1 && max_steps >= 0 && augment_multiplicity >= 0,
          ErrorCode::kContract, "face training config has non-positive fields");
}

std::vector<Triplet> SampleTriplets(std::span<const Embedding> embeddings,
                                    std::span<const int64_t> labels, Mining strategy,
                                    double alpha, Rng& rng) {
  Require(embeddings.size() == labels.size(), ErrorCode::kContract,
          "embeddings and labels differ in length");
  const auto n = static_cast<int64_t>(embeddings.size());
  std::vector<double> sim(static_cast<size_t>(n * n));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) sim[i * n + j] = Cosine(embeddings[i], embeddings[j]);
  }
  std::vector<Triplet> out;
  std::vector<int64_t> candidates;
  for (int64_t a = 0; a < n; ++a) {
    for (int64_t p = 0; p < n; ++p) {
      if (p == a || labels[p] != labels[a]) continue;
      const double ap = sim[a * n + p];
      candidates.clear();
      int64_t hardest = -1;
      for (int64_t k = 0; k < n; ++k) {
        if (labels[k] == labels[a]) continue;
        if (strategy == Mining::kAll) {
          out.push_back({a, p, k});
          continue;
        }
        if (sim[a * n + k] > ap - alpha) candidates.push_back(k);
        if (hardest < 0 || sim[a * n + k] > sim[a * n + hardest]) hardest = k;
      }
      if (strategy == Mining::kAll || hardest < 0) continue;
      const int64_t neg = candidates.empty()
                              ? hardest
                              : candidates[rng.Below(candidates.size())];
      out.push_back({a, p, neg});
    }
  }
  return out;
}

double ValidationEer(const SpeakerNet& model, std::span<const LabeledFeatures> data,
                     int64_t chunk_frames) {
  std::vector<Embedding> emb;
  emb.reserve(data.size());
  for (const auto& item : data) {
    const int64_t offset = std::max<int64_t>(0, (item.features.frames - chunk_frames) / 2);
    emb.push_back(model.Embed(Chunk(item.features, chunk_frames, offset)));
  }
  ScoreSet scores;
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t j = i + 1; j < data.size(); ++j) {
      const double s = CosineSimilarity(emb[i], emb[j]);
      (data[i].label == data[j].label ? scores.genuine : scores.impostor).push_back(s);
    }
  }
  return ComputeEer(scores).eer;
}

std::vector<SpeakerEpoch> TrainSpeaker(
    SpeakerNet& model, std::span<const LabeledFeatures> train,
    std::span<const LabeledFeatures> valid, const TrainConfig& config,
    const std::function<void(const SpeakerEpoch&)>& on_epoch) {
  config.Validate();
  std::map<int64_t, std::vector<size_t>> by_label;
  for (size_t i = 0; i < train.size(); ++i) {
    Require(train[i].features.frames >= model.spec().MinFrames(), ErrorCode::kTooShort,
            "training utterance is shorter than the model's minimum");
    by_label[train[i].label].push_back(i);
  }
  Require(by_label.size() >= 2, ErrorCode::kContract,
          "speaker training needs at least two labels");
  for (const auto& [label, items] : by_label) {
    Require(items.size() >= 2, ErrorCode::kContract,
            "every training label needs at least two utterances");
  }
  std::vector<int64_t> speakers;
  for (const auto& [label, items] : by_label) speakers.push_back(label);
  const auto per_batch = std::min<int64_t>(config.speakers_per_batch,
                                           static_cast<int64_t>(speakers.size()));
  const int64_t chunks_each = config.minibatch / config.speakers_per_batch;
  const auto steps_per_epoch = static_cast<int64_t>(
      (train.size() + static_cast<size_t>(config.minibatch) - 1) /
      static_cast<size_t>(config.minibatch));

  Rng rng(config.seed);
  Adam adam(model.params().tensors(), config.adam);
  ParameterList checkpoint = model.params().Clone();
  std::map<int64_t, std::vector<size_t>> queues;
  auto next_item = [&](int64_t label) {
    auto& q = queues[label];
    if (q.empty()) {
      q = by_label[label];
      rng.Shuffle(q);
    }
    const size_t item = q.back();
    q.pop_back();
    return item;
  };

  std::vector<SpeakerEpoch> history;
  int64_t total_steps = 0;
  try {
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      SpeakerEpoch record;
      record.epoch = epoch;
      double loss_sum = 0.0;
      int64_t loss_count = 0;
      for (int64_t step = 0; step < steps_per_epoch; ++step) {
        if (config.max_steps > 0 && total_steps >= config.max_steps) break;
        ++total_steps;
        std::vector<int64_t> chosen = speakers;
        rng.Shuffle(chosen);
        chosen.resize(static_cast<size_t>(per_batch));

        std::vector<Tensor> outputs;
        std::vector<Embedding> detached;
        std::vector<int64_t> labels;
        for (int64_t label : chosen) {
          for (int64_t c = 0; c < chunks_each; ++c) {
            const FeatureMatrix& f = train[next_item(label)].features;
            const int64_t room = std::max<int64_t>(0, f.frames - config.chunk_frames);
            const auto offset = static_cast<int64_t>(rng.Below(static_cast<uint64_t>(room) + 1));
            outputs.push_back(model.Forward(Chunk(f, config.chunk_frames, offset).ToTensor()));
            detached.push_back(ToEmbedding(outputs.back()));
            labels.push_back(label);
          }
        }
        const auto triplets =
            SampleTriplets(detached, labels, config.mining, config.margin_alpha, rng);
        if (triplets.empty()) {
          ++record.skipped_steps;
          continue;
        }
        std::vector<Tensor> losses;
        losses.reserve(triplets.size());
        for (const Triplet& t : triplets) {
          losses.push_back(ops::TripletLoss(outputs[t.anchor], outputs[t.positive],
                                            outputs[t.negative], config.margin_alpha));
        }
        Tensor loss = ops::MeanOf(losses);
        Require(std::isfinite(loss.item()), ErrorCode::kNumeric,
                "triplet loss became non-finite at step " + std::to_string(total_steps));
        loss_sum += loss.item();
        ++loss_count;
        if (loss.item() == 0.0) {
          // Every triplet already meets the margin; leave the weights alone.
          ++record.skipped_steps;
          continue;
        }
        adam.ZeroGrad();
        Backward(loss);
        adam.Step();
      }
      record.steps = total_steps;
      record.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
      record.valid_eer = valid.empty() ? 0.0 : ValidationEer(model, valid, config.chunk_frames);
      history.push_back(record);
      checkpoint.CopyValuesFrom(model.params());
      if (on_epoch) on_epoch(record);
      if (config.max_steps > 0 && total_steps >= config.max_steps) break;
    }
  } catch (const Error&) {
    model.params().CopyValuesFrom(checkpoint);
    throw;
  }
  return history;
}

std::vector<LabeledImage> AugmentDataset(std::span<const LabeledImage> images,
                                         int multiplicity, uint64_t seed) {
  std::vector<LabeledImage> out(images.begin(), images.end());
  for (size_t i = 0; i < images.size(); ++i) {
    for (Image& variant : Augment(images[i].image, seed * 7919 + i, multiplicity)) {
      out.push_back({std::move(variant), images[i].label});
    }
  }
  return out;
}

namespace {

Tensor FaceInput(const FaceNet& model, const Image& image) {
  const int64_t size = model.spec().input_size;
  Require(image.height == size && image.width == size, ErrorCode::kShape,
          "training image is " + std::to_string(image.height) + "x" +
              std::to_string(image.width) + "; the model expects " +
              std::to_string(size) + "x" + std::to_string(size));
  return ToRgb(image).ToTensor();
}

}  // namespace

FaceEvaluation EvaluateFace(const FaceNet& model, std::span<const LabeledImage> data) {
  FaceEvaluation eval;
  if (data.empty()) return eval;
  NoGradGuard no_grad;
  int64_t correct = 0;
  for (const auto& item : data) {
    Tensor logits = model.Forward(FaceInput(model, item.image));
    eval.loss += ops::SoftmaxXent(logits, item.label).item();
    auto d = logits.data();
    const int64_t pred = std::max_element(d.begin(), d.end()) - d.begin();
    eval.predictions.push_back(pred);
    correct += pred == item.label;
  }
  eval.loss /= static_cast<double>(data.size());
  eval.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return eval;
}

std::vector<FaceEpoch> TrainFace(FaceNet& model, std::span<const LabeledImage> train,
                                 std::span<const LabeledImage> valid,
                                 const FaceTrainConfig& config,
                                 const std::function<void(const FaceEpoch&)>& on_epoch) {
  config.Validate();
  Require(!train.empty(), ErrorCode::kContract, "face training set is empty");
  const int64_t classes = model.spec().num_classes;
  for (const auto& item : train) {
    Require(item.label >= 0 && item.label < classes, ErrorCode::kContract,
            "training label outside the model's classes");
  }
  const std::vector<LabeledImage> data =
      config.augment_multiplicity > 0
          ? AugmentDataset(train, config.augment_multiplicity, config.seed)
          : std::vector<LabeledImage>(train.begin(), train.end());
  std::vector<Tensor> inputs;
  inputs.reserve(data.size());
  for (const auto& item : data) inputs.push_back(FaceInput(model, item.image));

  Rng rng(config.seed);
  Adam adam(model.params().tensors(), config.adam);
  ParameterList checkpoint = model.params().Clone();
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<FaceEpoch> history;
  int64_t total_steps = 0;
  try {
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      rng.Shuffle(order);
      for (size_t start = 0; start < order.size();
           start += static_cast<size_t>(config.minibatch)) {
        if (config.max_steps > 0 && total_steps >= config.max_steps) break;
        ++total_steps;
        const size_t stop = std::min(order.size(), start + static_cast<size_t>(config.minibatch));
        std::vector<Tensor> losses;
        for (size_t i = start; i < stop; ++i) {
          losses.push_back(ops::SoftmaxXent(model.Forward(inputs[order[i]]),
                                            data[order[i]].label));
        }
        Tensor loss = ops::MeanOf(losses);
        Require(std::isfinite(loss.item()), ErrorCode::kNumeric,
                "cross-entropy became non-finite at step " + std::to_string(total_steps));
        adam.ZeroGrad();
        Backward(loss);
        adam.Step();
      }
      FaceEpoch record;
      record.epoch = epoch;
      record.steps = total_steps;
      const FaceEvaluation on_train = EvaluateFace(model, data);
      record.train_loss = on_train.loss;
      record.train_accuracy = on_train.accuracy;
      const FaceEvaluation on_valid = EvaluateFace(model, valid);
      record.valid_loss = on_valid.loss;
      record.valid_accuracy = on_valid.accuracy;
      history.push_back(record);
      checkpoint.CopyValuesFrom(model.params());
      if (on_epoch) on_epoch(record);
      if (config.max_steps > 0 && total_steps >= config.max_steps) break;
    }
  } catch (const Error&) {
    model.params().CopyValuesFrom(checkpoint);
    throw;
  }
  return history;
}

void WriteSpeakerHistory(std::ostream& out, std::span<const SpeakerEpoch> history) {
  const auto precision = out.precision();
  out.precision(17);
  out << "epoch\tsteps\tskipped\tmean_loss\tvalid_eer\n";
  for (const auto& h : history) {
    out << h.epoch << '\t' << h.steps << '\t' << h.skipped_steps << '\t' << h.mean_loss
        << '\t' << h.valid_eer << '\n';
  }
  out.precision(precision);
}

void WriteFaceHistory(std::ostream& out, std::span<const FaceEpoch> history) {
  const auto precision = out.precision();
  out.precision(17);
  out << "epoch\tsteps\ttrain_loss\ttrain_accuracy\tvalid_loss\tvalid_accuracy\n";
  for (const auto& h : history) {
    out << h.epoch << '\t' << h.steps << '\t' << h.train_loss << '\t' << h.train_accuracy
        << '\t' << h.valid_loss << '\t' << h.valid_accuracy << '\n';
  }
  out.precision(precision);
}

}  // namespace biogate
