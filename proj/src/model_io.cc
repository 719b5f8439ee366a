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


#include "biogate/model_io.h"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "biogate/error.h"
#include "biogate/wav.h"
#include "byte_io.h"

namespace biogate {
namespace {

using internal::ByteReader;
using internal::ByteWriter;

constexpr size_t kMinContainerBytes = 4 + 1 + 1 + 4 + 4 + 8;

template <typename Net>
ModelContainer Pack(const Net& net, ModelKind kind) {
  ModelContainer c;
  c.kind = kind;
  c.manifest = net.spec().ToManifest();
  for (const auto& [name, value] : net.params().entries()) {
    c.tensors.push_back({name, DType::kF64, value.shape(),
                         {value.data().begin(), value.data().end()}});
  }
  return c;
}

template <typename Net, typename Spec>
Net Unpack(const ModelContainer& c, ModelKind kind) {
  Require(c.kind == kind, ErrorCode::kSpecMismatch,
          std::string("container holds a ") + ModelKindName(c.kind) +
              " model, expected " + ModelKindName(kind));
  const Spec spec = Spec::FromManifest(c.manifest);
  Net net = [&] {
    try {
      return Net::Skeleton(spec);
    } catch (const Error& e) {
      Fail(ErrorCode::kSpecMismatch, std::string("container spec is invalid: ") + e.what());
    }
  }();
  auto& entries = net.params().entries();
  Require(c.tensors.size() == entries.size(), ErrorCode::kSpecMismatch,
          "container has " + std::to_string(c.tensors.size()) +
              " tensors; its spec declares " + std::to_string(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) {
    const TensorRecord& r = c.tensors[i];
    Tensor& t = entries[i].value;
    Require(r.name == entries[i].name, ErrorCode::kSpecMismatch,
            "tensor " + std::to_string(i) + " is '" + r.name + "', spec expects '" +
                entries[i].name + "'");
    Require(r.shape == t.shape(), ErrorCode::kSpecMismatch,
            "tensor '" + r.name + "' has shape " + ShapeToString(r.shape) +
                ", spec expects " + ShapeToString(t.shape()));
    std::copy(r.values.begin(), r.values.end(), t.mutable_data().begin());
  }
  return net;
}

}  // namespace

const char* ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSpeaker:
      return "speaker";
    case ModelKind::kFace:
      return "face";
  }
  return "?";
}

std::vector<uint8_t> EncodeContainer(const ModelContainer& c) {
  ByteWriter w;
  w.Raw(std::string_view(kModelMagic, 4));
  w.U8(c.version);
  w.U8(static_cast<uint8_t>(c.kind));
  Require(c.manifest.size() <= std::numeric_limits<uint32_t>::max() &&
              c.tensors.size() <= std::numeric_limits<uint32_t>::max(),
          ErrorCode::kContract, "container too large");
  w.U32(static_cast<uint32_t>(c.manifest.size()));
  w.Raw(c.manifest);
  w.U32(static_cast<uint32_t>(c.tensors.size()));
  for (const TensorRecord& r : c.tensors) {
    Require(r.name.size() <= std::numeric_limits<uint16_t>::max() &&
                r.shape.size() <= std::numeric_limits<uint8_t>::max(),
            ErrorCode::kContract, "tensor record '" + r.name + "' too large");
    Require(static_cast<int64_t>(r.values.size()) == NumElements(r.shape),
            ErrorCode::kShape, "tensor record '" + r.name + "' size disagrees with shape");
    w.U16(static_cast<uint16_t>(r.name.size()));
    w.Raw(r.name);
    w.U8(static_cast<uint8_t>(r.dtype));
    w.U8(static_cast<uint8_t>(r.shape.size()));
    for (int64_t d : r.shape) w.U32(static_cast<uint32_t>(d));
    for (double v : r.values) {
      if (r.dtype == DType::kF32) {
        w.F32(static_cast<float>(v));
      } else {
        w.F64(v);
      }
    }
  }
  w.Seal();
  return std::move(w.bytes());
}

uint64_t ContainerChecksum(std::span<const uint8_t> bytes) {
  return internal::VerifySealed(bytes, "model container");
}

ModelContainer DecodeContainer(std::span<const uint8_t> bytes) {
  const size_t head = std::min<size_t>(bytes.size(), 4);
  Require(std::equal(bytes.begin(), bytes.begin() + head, kModelMagic),
          ErrorCode::kFormat, "not a model container (bad magic)");
  Require(bytes.size() >= kMinContainerBytes, ErrorCode::kIntegrity,
          "model container is truncated");
  ContainerChecksum(bytes);
  ByteReader r(bytes.first(bytes.size() - 8), "model container");
  r.Raw(4);
  ModelContainer c;
  c.version = r.U8();
  Require(c.version == kModelFormatVersion, ErrorCode::kVersion,
          "model container version " + std::to_string(c.version) +
              " is not supported (expected " +
              std::to_string(kModelFormatVersion) + ")");
  const uint8_t kind = r.U8();
  Require(kind <= 1, ErrorCode::kFormat, "unknown model kind " + std::to_string(kind));
  c.kind = static_cast<ModelKind>(kind);
  c.manifest = r.Raw(r.U32());
  const uint32_t count = r.U32();
  for (uint32_t i = 0; i < count; ++i) {
    TensorRecord t;
    t.name = r.Raw(r.U16());
    const uint8_t dtype = r.U8();
    Require(dtype <= 1, ErrorCode::kFormat,
            "tensor '" + t.name + "' has unknown dtype " + std::to_string(dtype));
    t.dtype = static_cast<DType>(dtype);
    const uint8_t ndim = r.U8();
    for (uint8_t d = 0; d < ndim; ++d) t.shape.push_back(r.U32());
    const int64_t n = NumElements(t.shape);
    const size_t width = t.dtype == DType::kF32 ? 4 : 8;
    Require(static_cast<uint64_t>(n) * width <= r.remaining(), ErrorCode::kIntegrity,
            "model container is truncated");
    t.values.resize(static_cast<size_t>(n));
    for (double& v : t.values) v = t.dtype == DType::kF32 ? r.F32() : r.F64();
    c.tensors.push_back(std::move(t));
  }
  Require(r.remaining() == 0, ErrorCode::kFormat,
          "model container has trailing bytes before its checksum");
  return c;
}

ModelContainer ToContainer(const SpeakerNet& net) { return Pack(net, ModelKind::kSpeaker); }
ModelContainer ToContainer(const FaceNet& net) { return Pack(net, ModelKind::kFace); }

SpeakerNet SpeakerNetFromContainer(const ModelContainer& c) {
  return Unpack<SpeakerNet, SpeakerNetSpec>(c, ModelKind::kSpeaker);
}
FaceNet FaceNetFromContainer(const ModelContainer& c) {
  return Unpack<FaceNet, FaceNetSpec>(c, ModelKind::kFace);
}

uint64_t Fingerprint(const SpeakerNet& net) {
  return ContainerChecksum(EncodeContainer(ToContainer(net)));
}
uint64_t Fingerprint(const FaceNet& net) {
  return ContainerChecksum(EncodeContainer(ToContainer(net)));
}

std::string FingerprintHex(uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

void SaveModel(const std::string& path, const SpeakerNet& net) {
  WriteFileBytes(path, EncodeContainer(ToContainer(net)));
}
void SaveModel(const std::string& path, const FaceNet& net) {
  WriteFileBytes(path, EncodeContainer(ToContainer(net)));
}

ModelContainer ReadContainerFile(const std::string& path) {
  return DecodeContainer(ReadFileBytes(path));
}
SpeakerNet LoadSpeakerNet(const std::string& path) {
  return SpeakerNetFromContainer(ReadContainerFile(path));
}
FaceNet LoadFaceNet(const std::string& path) {
  return FaceNetFromContainer(ReadContainerFile(path));
}

}  // namespace biogate
