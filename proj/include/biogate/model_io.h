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


#ifndef BIOGATE_MODEL_IO_H_
#define BIOGATE_MODEL_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biogate/face_net.h"
#include "biogate/speaker_net.h"
#include "biogate/tensor.h"

namespace biogate {

// Weight container layout; see docs/model_format.md.
inline constexpr char kModelMagic[4] = {'B', 'G', 'M', '1'};
inline constexpr uint8_t kModelFormatVersion = 1;

enum class ModelKind : uint8_t { kSpeaker = 0, kFace = 1 };
enum class DType : uint8_t { kF64 = 0, kF32 = 1 };

const char* ModelKindName(ModelKind kind);

struct TensorRecord {
  std::string name;
  DType dtype = DType::kF64;
  Shape shape;
  std::vector<double> values;  // widened to double in memory
};

struct ModelContainer {
  uint8_t version = kModelFormatVersion;
  ModelKind kind = ModelKind::kSpeaker;
  std::string manifest;
  std::vector<TensorRecord> tensors;
};

// kF32 records are narrowed on encode and widened on decode.
std::vector<uint8_t> EncodeContainer(const ModelContainer& container);
// Checks magic (kFormat), then checksum and length (kIntegrity), then
// version (kVersion).
ModelContainer DecodeContainer(std::span<const uint8_t> bytes);
// The trailing checksum, after verifying it.
uint64_t ContainerChecksum(std::span<const uint8_t> bytes);

ModelContainer ToContainer(const SpeakerNet& net);
ModelContainer ToContainer(const FaceNet& net);
// kSpecMismatch when the kind, manifest or any tensor name/shape disagrees
// with the declared spec.
SpeakerNet SpeakerNetFromContainer(const ModelContainer& container);
FaceNet FaceNetFromContainer(const ModelContainer& container);

// Checksum of the canonical (all-f64) encoding.
uint64_t Fingerprint(const SpeakerNet& net);
uint64_t Fingerprint(const FaceNet& net);
std::string FingerprintHex(uint64_t fingerprint);

void SaveModel(const std::string& path, const SpeakerNet& net);
void SaveModel(const std::string& path, const FaceNet& net);
ModelContainer ReadContainerFile(const std::string& path);
SpeakerNet LoadSpeakerNet(const std::string& path);
FaceNet LoadFaceNet(const std::string& path);

}  // namespace biogate

#endif  // BIOGATE_MODEL_IO_H_
