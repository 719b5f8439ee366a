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


#include "biogate/face_net.h"

#include <algorithm>
#include <sstream>

#include "biogate/error.h"
#include "biogate/ops.h"
#include "manifest_util.h"

namespace biogate {

namespace {

std::string ConvName(size_t stage, size_t conv) {
  return "stage" + std::to_string(stage) + ".conv" + std::to_string(conv);
}

}  // namespace

FaceNetSpec FaceNetSpec::Full(int64_t num_classes) {
  FaceNetSpec spec;
  spec.num_classes = num_classes;
  return spec;
}

FaceNetSpec FaceNetSpec::Toy(int64_t num_classes) {
  FaceNetSpec spec = Full(num_classes);
  for (auto& stage : spec.stages) {
    for (int64_t& c : stage) c /= 8;
  }
  spec.input_size = 56;
  spec.hidden = 64;
  return spec;
}

int64_t FaceNetSpec::SpatialAfterTrunk() const {
  int64_t s = input_size;
  for (size_t i = 0; i < stages.size(); ++i) s /= 2;
  return s;
}

int64_t FaceNetSpec::TrunkFeatures() const {
  const int64_t s = SpatialAfterTrunk();
  return stages.back().back() * s * s;
}

void FaceNetSpec::Validate() const {
  Require(num_classes >= 2, ErrorCode::kSpec, "face net needs at least two classes");
  Require(input_size >= 1 && kernel >= 1 && hidden >= 1 && !stages.empty(),
          ErrorCode::kSpec, "face net spec has non-positive fields");
  for (const auto& stage : stages) {
    Require(!stage.empty(), ErrorCode::kSpec, "face net stage without convolutions");
    for (int64_t c : stage) {
      Require(c >= 1, ErrorCode::kSpec, "face net channel counts must be positive");
    }
  }
  Require(SpatialAfterTrunk() >= 1, ErrorCode::kSpec,
          "face net input " + std::to_string(input_size) +
              " is pooled away by the trunk");
}

std::string FaceNetSpec::ToManifest() const {
  std::ostringstream out;
  out << "face-net\n"
      << "input_size " << input_size << '\n'
      << "stages " << stages.size() << '\n';
  for (size_t s = 0; s < stages.size(); ++s) {
    out << "stage" << s << ' ' << internal::JoinInts(stages[s]) << '\n';
  }
  out << "kernel " << kernel << '\n'
      << "hidden " << hidden << '\n'
      << "num_classes " << num_classes << '\n';
  return out.str();
}

FaceNetSpec FaceNetSpec::FromManifest(const std::string& text) {
  auto kv = internal::KeyValues::Parse(text, "face-net");
  FaceNetSpec spec;
  spec.input_size = kv.Int("input_size");
  const int64_t n = kv.Int("stages");
  Require(n >= 1 && n <= 64, ErrorCode::kSpecMismatch, "bad face net stage count");
  spec.stages.clear();
  for (int64_t s = 0; s < n; ++s) spec.stages.push_back(kv.Ints("stage" + std::to_string(s)));
  spec.kernel = kv.Int("kernel");
  spec.hidden = kv.Int("hidden");
  spec.num_classes = kv.Int("num_classes");
  return spec;
}

FaceNet FaceNet::Skeleton(const FaceNetSpec& spec) {
  spec.Validate();
  FaceNet net;
  net.spec_ = spec;
  int64_t in_ch = 3;
  for (size_t s = 0; s < spec.stages.size(); ++s) {
    for (size_t i = 0; i < spec.stages[s].size(); ++i) {
      const int64_t c = spec.stages[s][i];
      net.params_.Add(ConvName(s, i) + ".weight", {c, in_ch, spec.kernel, spec.kernel});
      net.params_.Add(ConvName(s, i) + ".bias", {c});
      in_ch = c;
    }
  }
  net.params_.Add("head.hidden.weight", {spec.TrunkFeatures(), spec.hidden});
  net.params_.Add("head.hidden.bias", {spec.hidden});
  net.params_.Add("head.out.weight", {spec.hidden, spec.num_classes});
  net.params_.Add("head.out.bias", {spec.num_classes});
  return net;
}

FaceNet FaceNet::Build(const FaceNetSpec& spec, uint64_t seed) {
  FaceNet net = Skeleton(spec);
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

Tensor FaceNet::Forward(const Tensor& input, ShapeTrace* trace) const {
  const int64_t size = spec_.input_size;
  Require(input.rank() == 3 && input.dim(0) == 3 && input.dim(1) == size &&
              input.dim(2) == size,
          ErrorCode::kShape,
          "face net expects [3, " + std::to_string(size) + ", " +
              std::to_string(size) + "], got " + ShapeToString(input.shape()));
  auto p = [this](const std::string& name) -> const Tensor& {
    return params_.Get(name);
  };
  Tensor x = input;
  for (size_t s = 0; s < spec_.stages.size(); ++s) {
    for (size_t i = 0; i < spec_.stages[s].size(); ++i) {
      x = ops::Relu(ops::Conv2d(x, p(ConvName(s, i) + ".weight"),
                                p(ConvName(s, i) + ".bias"), {1, 1},
                                ops::Padding::kSame));
    }
    x = ops::MaxPool2d(x, 2);
    if (trace) trace->emplace_back("stage" + std::to_string(s), x.shape());
  }
  x = ops::Reshape(x, {x.numel()});
  if (trace) trace->emplace_back("flatten", x.shape());
  x = ops::Relu(ops::Dense(x, p("head.hidden.weight"), p("head.hidden.bias")));
  if (trace) trace->emplace_back("hidden", x.shape());
  x = ops::Dense(x, p("head.out.weight"), p("head.out.bias"));
  if (trace) trace->emplace_back("logits", x.shape());
  return x;
}

ShapeTrace FaceNet::TraceShapes() const {
  ShapeTrace trace;
  int64_t s = spec_.input_size;
  for (size_t i = 0; i < spec_.stages.size(); ++i) {
    // Same-padded stride-1 convs keep the extent; the pool halves it.
    s /= 2;
    trace.emplace_back("stage" + std::to_string(i), Shape{spec_.stages[i].back(), s, s});
  }
  trace.emplace_back("flatten", Shape{spec_.TrunkFeatures()});
  trace.emplace_back("hidden", Shape{spec_.hidden});
  trace.emplace_back("logits", Shape{spec_.num_classes});
  return trace;
}

FacePrediction FaceNet::Classify(const Image& image) const {
  Require(image.height == spec_.input_size && image.width == spec_.input_size,
          ErrorCode::kShape,
          "face image is " + std::to_string(image.height) + "x" +
              std::to_string(image.width) + "; the model expects " +
              std::to_string(spec_.input_size) + "x" +
              std::to_string(spec_.input_size));
  NoGradGuard no_grad;
  Tensor logits = Forward(ToRgb(image).ToTensor());
  FacePrediction pred;
  pred.probs = ops::Softmax(logits.data());
  auto best = std::max_element(pred.probs.begin(), pred.probs.end());
  pred.label = best - pred.probs.begin();
  pred.confidence = *best;
  return pred;
}

FaceNet FaceNet::Clone() const {
  FaceNet copy;
  copy.spec_ = spec_;
  copy.params_ = params_.Clone();
  return copy;
}

ParamReport FaceNet::CountParams() const {
  ParamReport report;
  const std::string k = std::to_string(spec_.kernel);
  for (size_t s = 0; s < spec_.stages.size(); ++s) {
    for (size_t i = 0; i < spec_.stages[s].size(); ++i) {
      const std::string conv = "stage" + std::to_string(s) + ".conv" + std::to_string(i);
      const int64_t n = params_.Get(conv + ".weight").numel() +
                        params_.Get(conv + ".bias").numel();
      const std::string c = std::to_string(spec_.stages[s][i]);
      if (!report.layers.empty() && report.layers.back().params_each == n &&
          report.layers.back().layer == "Conv" + c) {
        ++report.layers.back().repeat;
      } else {
        report.layers.push_back({"Conv" + c, k + "x" + k + ", " + c, "1x1", n, 1});
      }
    }
    report.layers.push_back({"MaxPool", "2x2", "2x2", 0, 1});
  }
  auto dense = [this](const std::string& name) {
    const Tensor& w = params_.Get(name + ".weight");
    return LayerCount{name == "head.hidden" ? "FC" : "Output",
                      std::to_string(w.dim(0)) + "x" + std::to_string(w.dim(1)), "-",
                      w.numel() + params_.Get(name + ".bias").numel(), 1};
  };
  report.layers.push_back(dense("head.hidden"));
  report.layers.push_back(dense("head.out"));
  report.layers.push_back({"softmax", "-", "-", 0, 1});
  for (const auto& l : report.layers) report.total += l.total();
  return report;
}

}  // namespace biogate
