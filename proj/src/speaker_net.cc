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

#include "biogate/speaker_net.h"

#include <cmath>
#include <sstream>

#include "biogate/error.h"
#include "biogate/ops.h"
#include "manifest_util.h"

namespace biogate {

SpeakerNetSpec SpeakerNetSpec::Full() { return SpeakerNetSpec{}; }

SpeakerNetSpec SpeakerNetSpec::Toy() {
  SpeakerNetSpec spec;
  spec.channels = {8, 16, 32, 64};
  spec.affine_in = 4 * 64;
  return spec;
}

int64_t SpeakerNetSpec::FrequencyAfterStages() const {
  int64_t f = n_mels;
  for (size_t i = 0; i < channels.size(); ++i) {
    f = ops::ConvOutputExtent(f, stage_kernel, stage_stride, ops::Padding::kSame);
  }
  return f;
}

int64_t SpeakerNetSpec::MinFrames() const {
  int64_t frames = 1;
  for (size_t i = 0; i < channels.size(); ++i) frames *= stage_stride;
  return frames;
}

void SpeakerNetSpec::Validate() const {
  Require(n_mels >= 1 && !channels.empty() && blocks_per_stage >= 0 &&
              stage_kernel >= 1 && stage_stride >= 1 && block_kernel >= 1 &&
              embedding_dim >= 1,
          ErrorCode::kSpec, "speaker net spec has non-positive fields");
  for (int64_t c : channels) {
    Require(c >= 1, ErrorCode::kSpec, "speaker net channel counts must be positive");
  }
  const int64_t reached = FrequencyAfterStages() * channels.back();
  Require(reached == affine_in, ErrorCode::kSpec,
          "speaker net shape chain reaches " + std::to_string(reached) +
              " features but the affine layer expects " +
              std::to_string(affine_in));
}

std::string SpeakerNetSpec::ToManifest() const {
  std::ostringstream out;
  out << "speaker-net\n"
      << "n_mels " << n_mels << '\n'
      << "channels " << internal::JoinInts(channels) << '\n'
      << "blocks_per_stage " << blocks_per_stage << '\n'
      << "stage_kernel " << stage_kernel << '\n'
      << "stage_stride " << stage_stride << '\n'
      << "block_kernel " << block_kernel << '\n'
      << "embedding_dim " << embedding_dim << '\n'
      << "affine_in " << affine_in << '\n';
  return out.str();
}

SpeakerNetSpec SpeakerNetSpec::FromManifest(const std::string& text) {
  auto kv = internal::KeyValues::Parse(text, "speaker-net");
  SpeakerNetSpec spec;
  spec.n_mels = kv.Int("n_mels");
  spec.channels = kv.Ints("channels");
  spec.blocks_per_stage = kv.Int("blocks_per_stage");
  spec.stage_kernel = kv.Int("stage_kernel");
  spec.stage_stride = kv.Int("stage_stride");
  spec.block_kernel = kv.Int("block_kernel");
  spec.embedding_dim = kv.Int("embedding_dim");
  spec.affine_in = kv.Int("affine_in");
  return spec;
}

double Embedding::Norm() const {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

double CosineSimilarity(const Embedding& a, const Embedding& b) {
  Require(a.dim() == b.dim() && a.dim() > 0, ErrorCode::kShape,
          "cosine similarity of embeddings with different dimensions");
  double dot = 0.0;
  for (size_t i = 0; i < a.dim(); ++i) dot += a.values[i] * b.values[i];
  return dot;
}

Embedding MeanEmbedding(std::span<const Embedding> embeddings) {
  Require(!embeddings.empty(), ErrorCode::kContract, "mean of no embeddings");
  const size_t dim = embeddings.front().dim();
  std::vector<double> sum(dim, 0.0);
  for (const Embedding& e : embeddings) {
    Require(e.dim() == dim, ErrorCode::kShape, "embedding dimensions differ");
    for (size_t i = 0; i < dim; ++i) sum[i] += e.values[i];
  }
  Tensor normalized =
      ops::L2Normalize(Tensor::FromVector({static_cast<int64_t>(dim)}, sum));
  return Embedding{{normalized.data().begin(), normalized.data().end()}};
}

std::string SpeakerNet::StageName(size_t stage) const {
  return "stage" + std::to_string(stage);
}

SpeakerNet SpeakerNet::Skeleton(const SpeakerNetSpec& spec) {
  spec.Validate();
  SpeakerNet net;
  net.spec_ = spec;
  int64_t in_ch = 1;
  const int64_t k = spec.stage_kernel, bk = spec.block_kernel;
  for (size_t s = 0; s < spec.channels.size(); ++s) {
    const int64_t c = spec.channels[s];
    const std::string stage = net.StageName(s);
    net.params_.Add(stage + ".conv.weight", {c, in_ch, k, k});
    net.params_.Add(stage + ".conv.bias", {c});
    for (int64_t b = 0; b < spec.blocks_per_stage; ++b) {
      const std::string block = stage + ".block" + std::to_string(b);
      net.params_.Add(block + ".conv0.weight", {c, c, 1, 1});
      net.params_.Add(block + ".conv0.bias", {c});
      net.params_.Add(block + ".conv1.weight", {c, c, bk, bk});
      net.params_.Add(block + ".conv1.bias", {c});
      net.params_.Add(block + ".conv2.weight", {c, c, 1, 1});
      net.params_.Add(block + ".conv2.bias", {c});
    }
    in_ch = c;
  }
  net.params_.Add("affine.weight", {spec.affine_in, spec.embedding_dim});
  net.params_.Add("affine.bias", {spec.embedding_dim});
  return net;
}

SpeakerNet SpeakerNet::Build(const SpeakerNetSpec& spec, uint64_t seed) {
  SpeakerNet net = Skeleton(spec);
  Rng rng(seed);
  for (auto& [name, tensor] : net.params_.entries()) {
    if (tensor.rank() == 4) {
      InitFanInUniform(tensor, tensor.dim(1) * tensor.dim(2) * tensor.dim(3), rng);
    } else if (tensor.rank() == 2) {
      InitFanInUniform(tensor, tensor.dim(0), rng);
    }
  }
  return net;
}

Tensor SpeakerNet::Forward(const Tensor& input, ShapeTrace* trace) const {
  Require(input.rank() == 3 && input.dim(0) == 1 && input.dim(1) == spec_.n_mels,
          ErrorCode::kShape,
          "speaker net expects [1, " + std::to_string(spec_.n_mels) +
              ", T], got " + ShapeToString(input.shape()));
  const ops::Stride stage_stride{spec_.stage_stride, spec_.stage_stride};
  const ops::Stride unit{1, 1};
  const auto same = ops::Padding::kSame;
  auto p = [this](const std::string& name) -> const Tensor& {
    return params_.Get(name);
  };

  Tensor x = input;
  for (size_t s = 0; s < spec_.channels.size(); ++s) {
    const std::string stage = StageName(s);
    x = ops::Relu(ops::Conv2d(x, p(stage + ".conv.weight"),
                              p(stage + ".conv.bias"), stage_stride, same));
    for (int64_t b = 0; b < spec_.blocks_per_stage; ++b) {
      const std::string block = stage + ".block" + std::to_string(b);
      Tensor h = ops::Relu(ops::Conv2d(x, p(block + ".conv0.weight"),
                                       p(block + ".conv0.bias"), unit, same));
      h = ops::Relu(ops::Conv2d(h, p(block + ".conv1.weight"),
                                p(block + ".conv1.bias"), unit, same));
      h = ops::Conv2d(h, p(block + ".conv2.weight"), p(block + ".conv2.bias"),
                      unit, same);
      x = ops::Relu(ops::Add(x, h));
    }
    if (trace) trace->emplace_back(stage, x.shape());
  }
  x = ops::MeanOverTime(x);
  if (trace) trace->emplace_back("mean", x.shape());
  x = ops::Reshape(x, {x.numel()});
  if (trace) trace->emplace_back("flatten", x.shape());
  x = ops::Dense(x, p("affine.weight"), p("affine.bias"));
  if (trace) trace->emplace_back("affine", x.shape());
  x = ops::L2Normalize(x);
  if (trace) trace->emplace_back("l2norm", x.shape());
  return x;
}

Embedding SpeakerNet::Embed(const FeatureMatrix& features) const {
  Require(features.dim == spec_.n_mels, ErrorCode::kShape,
          "feature dimension " + std::to_string(features.dim) +
              " does not match the model's " + std::to_string(spec_.n_mels));
  Require(features.frames >= spec_.MinFrames(), ErrorCode::kTooShort,
          "utterance has " + std::to_string(features.frames) +
              " frames; the speaker model needs at least " +
              std::to_string(spec_.MinFrames()));
  NoGradGuard no_grad;
  Tensor out = Forward(features.ToTensor());
  return Embedding{{out.data().begin(), out.data().end()}};
}

ParamReport SpeakerNet::CountParams() const {
  ParamReport report;
  auto sum_prefix = [this](const std::string& prefix) {
    int64_t n = 0;
    for (const auto& e : params_.entries()) {
      if (e.name.rfind(prefix, 0) == 0) n += e.value.numel();
    }
    return n;
  };
  const std::string k = std::to_string(spec_.stage_kernel);
  const std::string bk = std::to_string(spec_.block_kernel);
  const std::string st = std::to_string(spec_.stage_stride);
  for (size_t s = 0; s < spec_.channels.size(); ++s) {
    const std::string c = std::to_string(spec_.channels[s]);
    const std::string stage = StageName(s);
    report.layers.push_back({"Conv" + c, k + "x" + k + ", " + c, st + "x" + st,
                             sum_prefix(stage + ".conv."), 1});
    if (spec_.blocks_per_stage > 0) {
      report.layers.push_back(
          {"Res" + c,
           "[1x1, " + c + "; " + bk + "x" + bk + ", " + c + "; 1x1, " + c + "]",
           "1x1", sum_prefix(stage + ".block0."),
           static_cast<int>(spec_.blocks_per_stage)});
    }
  }
  report.layers.push_back({"mean", "-", "-", 0, 1});
  report.layers.push_back(
      {"affine",
       std::to_string(spec_.affine_in) + "x" + std::to_string(spec_.embedding_dim),
       "-", sum_prefix("affine."), 1});
  report.layers.push_back({"triplet", "-", "-", 0, 1});
  for (const auto& l : report.layers) report.total += l.total();
  return report;
}

SpeakerNet SpeakerNet::Clone() const {
  SpeakerNet copy;
  copy.spec_ = spec_;
  copy.params_ = params_.Clone();
  return copy;
}

}  // namespace biogate
