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


#ifndef BIOGATE_AUTHSYS_H_
#define BIOGATE_AUTHSYS_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "biogate/error.h"
#include "biogate/face_net.h"
#include "biogate/fbank.h"
#include "biogate/image.h"
#include "biogate/metrics.h"
#include "biogate/speaker_net.h"
#include "biogate/wav.h"

namespace biogate {

inline constexpr int kStoreFormatVersion = 1;

struct EnrollmentRecord {
  std::string user_id;
  int64_t face_class = 0;
  Embedding voice_template;
  int64_t enrolled_at = 0;  // seconds since the Unix epoch
  int64_t face_samples = 0;
  int64_t voice_samples = 0;

  bool operator==(const EnrollmentRecord&) const = default;
};

// Plain, copyable store contents. Fingerprints bind the store to the models
// used at enrollment; zero means not yet bound.
struct StoreData {
  uint64_t face_fingerprint = 0;
  uint64_t speaker_fingerprint = 0;
  int64_t face_classes = 0;
  int64_t embedding_dim = 0;
  std::map<std::string, EnrollmentRecord> users;

  bool operator==(const StoreData&) const = default;
};

// Text header, little-endian embedding block, trailing FNV-1a checksum; see
// docs/store_format.md.
std::vector<uint8_t> EncodeStore(const StoreData& data);
// kFormat on a foreign file, kIntegrity on checksum failure or truncation,
// kVersion on an unsupported version.
StoreData DecodeStore(std::span<const uint8_t> bytes);

// Thread-safe enrollment store: many concurrent readers, exclusive writers.
class EnrollmentStore {
 public:
  EnrollmentStore() = default;
  explicit EnrollmentStore(StoreData data) : data_(std::move(data)) {}
  EnrollmentStore(const EnrollmentStore&) = delete;
  EnrollmentStore& operator=(const EnrollmentStore&) = delete;

  static std::unique_ptr<EnrollmentStore> Load(const std::string& path);
  void Save(const std::string& path) const;

  StoreData Snapshot() const;
  size_t size() const;
  bool Contains(const std::string& user_id) const;
  std::optional<EnrollmentRecord> Find(const std::string& user_id) const;
  std::optional<EnrollmentRecord> FindByFaceClass(int64_t face_class) const;

  // Binds on first use, then requires the same fingerprints (kFingerprint).
  // kConflict on a repeated user id or an already-bound face class.
  void Add(const EnrollmentRecord& record, uint64_t face_fingerprint,
           uint64_t speaker_fingerprint, int64_t face_classes);

  // kFingerprint unless the store is bound to exactly these models.
  void CheckBinding(uint64_t face_fingerprint, uint64_t speaker_fingerprint) const;

  // One 1:1 template comparison; counted. kNotFound for unknown users.
  double CompareWithTemplate(const std::string& user_id, const Embedding& probe) const;
  uint64_t comparisons() const { return comparisons_.load(); }

 private:
  mutable std::shared_mutex mu_;
  StoreData data_;
  mutable std::atomic<uint64_t> comparisons_{0};
};

// The two model-backed steps behind std::function so tests can substitute
// constructed classifiers and embeddings.
struct Pipeline {
  std::function<FacePrediction(const Image&)> classify_face;
  std::function<Embedding(const AudioClip&)> embed_voice;
  uint64_t face_fingerprint = 0;
  uint64_t speaker_fingerprint = 0;
  int64_t face_classes = 0;

  // The models must outlive the pipeline.
  static Pipeline FromModels(const FaceNet& face, const SpeakerNet& speaker,
                             const FeatureConfig& features = {});
};

struct Thresholds {
  double face = 0.5;
  double voice = 0.5;
};

struct EnrollRequest {
  std::string user_id;
  // Negative: bind to the majority predicted class over the face images.
  int64_t face_class = -1;
  std::vector<Image> face_images;
  std::vector<AudioClip> voice_clips;
  int64_t enrolled_at = 0;
};

// Template is the L2-normalized mean of the per-clip embeddings.
EnrollmentRecord Enroll(EnrollmentStore& store, const EnrollRequest& request,
                        const Pipeline& pipeline);

struct FaceMatch {
  FacePrediction prediction;
  std::optional<std::string> user_id;  // empty on reject
};

// Accepts iff confidence >= tau_face. Throws kUnmappedClass when the argmax
// class has no enrolled user.
FaceMatch IdentifyFace(const EnrollmentStore& store, const Image& image,
                       const Pipeline& pipeline, double tau_face);

struct VoiceMatch {
  double score = 0.0;
  bool accepted = false;
};

VoiceMatch VerifyVoice(const EnrollmentStore& store, const std::string& user_id,
                       const AudioClip& clip, const Pipeline& pipeline,
                       double tau_voice);

enum class Outcome { kAccept, kRejectFace, kRejectVoice, kError };
const char* OutcomeName(Outcome outcome);

struct VerificationDecision {
  Outcome outcome = Outcome::kError;
  std::optional<std::string> claimed_identity;
  double face_confidence = 0.0;
  int64_t face_class = -1;
  std::optional<double> voice_score;
  Thresholds thresholds;
  std::optional<ErrorCode> error;
  std::string error_message;
};

// Face identification gates a single 1:1 voice comparison. Errors are
// reported in the decision rather than thrown.
VerificationDecision Authenticate(const EnrollmentStore& store, const Image& image,
                                  const AudioClip& clip, const Pipeline& pipeline,
                                  const Thresholds& thresholds);

// tau_voice is the dev-set EER threshold; tau_face is the smallest
// confidence whose dev false-accept rate is at most `face_far_target`.
Thresholds CalibrateThresholds(const ScoreSet& face_dev, const ScoreSet& voice_dev,
                               double face_far_target = 0.05);
double FaceThresholdForTarget(std::span<const double> impostor_confidences,
                              double far_target);

}  // namespace biogate

#endif  // BIOGATE_AUTHSYS_H_
