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


#include "biogate/authsys.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>

#include "biogate/model_io.h"
#include "byte_io.h"

namespace biogate {
namespace {

constexpr std::string_view kStoreMagic = "BGSTORE ";

void CheckUserId(const std::string& id) {
  Require(!id.empty() && id.size() <= 256, ErrorCode::kContract,
          "user id must be 1-256 characters");
  for (unsigned char c : id) {
    Require(std::isgraph(c), ErrorCode::kContract,
            "user id '" + id + "' contains whitespace or control characters");
  }
}

uint64_t ParseHex(const std::string& s) {
  Require(s.size() == 16 && s.find_first_not_of("0123456789abcdef") == std::string::npos,
          ErrorCode::kFormat, "store fingerprint '" + s + "' is not 16 hex digits");
  return std::stoull(s, nullptr, 16);
}

// Reads "<key> <value>" and returns the value.
std::string ExpectLine(std::istringstream& in, const std::string& key) {
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kFormat,
          "store header ends before '" + key + "'");
  Require(line.rfind(key + " ", 0) == 0, ErrorCode::kFormat,
          "store header expected '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

int64_t ToInt(const std::string& s, const std::string& what) {
  size_t used = 0;
  int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  Require(used == s.size() && !s.empty(), ErrorCode::kFormat,
          "store field " + what + " is not an integer: '" + s + "'");
  return v;
}

}  // namespace

std::vector<uint8_t> EncodeStore(const StoreData& data) {
  std::ostringstream header;
  header << kStoreMagic << kStoreFormatVersion << '\n'
         << "face_fingerprint " << FingerprintHex(data.face_fingerprint) << '\n'
         << "speaker_fingerprint " << FingerprintHex(data.speaker_fingerprint) << '\n'
         << "face_classes " << data.face_classes << '\n'
         << "embedding_dim " << data.embedding_dim << '\n'
         << "users " << data.users.size() << '\n';
  for (const auto& [id, r] : data.users) {
    Require(static_cast<int64_t>(r.voice_template.dim()) == data.embedding_dim,
            ErrorCode::kShape, "template of '" + id + "' has the wrong dimension");
    header << "user " << id << ' ' << r.face_class << ' ' << r.enrolled_at << ' '
           << r.face_samples << ' ' << r.voice_samples << '\n';
  }
  header << "end\n";
  internal::ByteWriter w;
  w.Raw(header.str());
  for (const auto& [id, r] : data.users) {
    for (double v : r.voice_template.values) w.F64(v);
  }
  w.Seal();
  return std::move(w.bytes());
}

StoreData DecodeStore(std::span<const uint8_t> bytes) {
  const size_t head = std::min(bytes.size(), kStoreMagic.size());
  Require(std::equal(bytes.begin(), bytes.begin() + head, kStoreMagic.begin()),
          ErrorCode::kFormat, "not an enrollment store");
  Require(bytes.size() > kStoreMagic.size() + 8, ErrorCode::kIntegrity,
          "enrollment store is truncated");
  internal::VerifySealed(bytes, "enrollment store");
  const auto body = bytes.first(bytes.size() - 8);
  const std::string_view text(reinterpret_cast<const char*>(body.data()), body.size());
  const size_t end_mark = text.find("\nend\n");
  Require(end_mark != std::string_view::npos, ErrorCode::kFormat,
          "enrollment store header has no end marker");
  std::istringstream in(std::string(text.substr(0, end_mark + 1)));

  std::string line;
  std::getline(in, line);
  const int version = static_cast<int>(ToInt(line.substr(kStoreMagic.size()), "version"));
  Require(version == kStoreFormatVersion, ErrorCode::kVersion,
          "enrollment store version " + std::to_string(version) +
              " is not supported (expected " + std::to_string(kStoreFormatVersion) +
              ")");
  StoreData data;
  data.face_fingerprint = ParseHex(ExpectLine(in, "face_fingerprint"));
  data.speaker_fingerprint = ParseHex(ExpectLine(in, "speaker_fingerprint"));
  data.face_classes = ToInt(ExpectLine(in, "face_classes"), "face_classes");
  data.embedding_dim = ToInt(ExpectLine(in, "embedding_dim"), "embedding_dim");
  const int64_t count = ToInt(ExpectLine(in, "users"), "users");
  Require(count >= 0 && data.embedding_dim >= 0, ErrorCode::kFormat,
          "enrollment store has negative counts");
  std::vector<std::string> order;
  for (int64_t i = 0; i < count; ++i) {
    std::istringstream fields(ExpectLine(in, "user"));
    EnrollmentRecord r;
    std::string face_class, at, faces, voices, extra;
    fields >> r.user_id >> face_class >> at >> faces >> voices;
    Require(static_cast<bool>(fields) && !(fields >> extra), ErrorCode::kFormat,
            "malformed user line in enrollment store");
    r.face_class = ToInt(face_class, "face_class");
    r.enrolled_at = ToInt(at, "enrolled_at");
    r.face_samples = ToInt(faces, "faces");
    r.voice_samples = ToInt(voices, "utterances");
    Require(data.users.emplace(r.user_id, r).second, ErrorCode::kFormat,
            "enrollment store lists '" + r.user_id + "' twice");
    order.push_back(r.user_id);
  }
  const size_t block = end_mark + 5;
  const uint64_t expected = static_cast<uint64_t>(count) *
                            static_cast<uint64_t>(data.embedding_dim) * 8;
  Require(body.size() - block == expected, ErrorCode::kFormat,
          "enrollment store embedding block has the wrong size");
  internal::ByteReader reader(body.subspan(block), "enrollment store");
  for (const std::string& id : order) {
    auto& values = data.users[id].voice_template.values;
    values.resize(static_cast<size_t>(data.embedding_dim));
    for (double& v : values) v = reader.F64();
  }
  return data;
}

std::unique_ptr<EnrollmentStore> EnrollmentStore::Load(const std::string& path) {
  return std::make_unique<EnrollmentStore>(DecodeStore(ReadFileBytes(path)));
}

void EnrollmentStore::Save(const std::string& path) const {
  std::shared_lock lock(mu_);
  // Write then rename so a crash never leaves a half-written store.
  const std::string tmp = path + ".tmp";
  WriteFileBytes(tmp, EncodeStore(data_));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  Require(!ec, ErrorCode::kIo, "cannot replace " + path + ": " + ec.message());
}

StoreData EnrollmentStore::Snapshot() const {
  std::shared_lock lock(mu_);
  return data_;
}

size_t EnrollmentStore::size() const {
  std::shared_lock lock(mu_);
  return data_.users.size();
}

bool EnrollmentStore::Contains(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  return data_.users.count(user_id) > 0;
}

std::optional<EnrollmentRecord> EnrollmentStore::Find(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  auto it = data_.users.find(user_id);
  if (it == data_.users.end()) return std::nullopt;
  return it->second;
}

std::optional<EnrollmentRecord> EnrollmentStore::FindByFaceClass(int64_t face_class) const {
  std::shared_lock lock(mu_);
  for (const auto& [id, r] : data_.users) {
    if (r.face_class == face_class) return r;
  }
  return std::nullopt;
}

void EnrollmentStore::Add(const EnrollmentRecord& record, uint64_t face_fingerprint,
                          uint64_t speaker_fingerprint, int64_t face_classes) {
  CheckUserId(record.user_id);
  std::unique_lock lock(mu_);
  const bool bound = data_.face_fingerprint != 0 || data_.speaker_fingerprint != 0;
  if (bound) {
    Require(data_.face_fingerprint == face_fingerprint &&
                data_.speaker_fingerprint == speaker_fingerprint,
            ErrorCode::kFingerprint,
            "store was enrolled with different models (face " +
                FingerprintHex(data_.face_fingerprint) + ", speaker " +
                FingerprintHex(data_.speaker_fingerprint) + ")");
  }
  if (!data_.users.empty()) {
    Require(static_cast<int64_t>(record.voice_template.dim()) == data_.embedding_dim,
            ErrorCode::kShape, "voice template dimension differs from the store's");
  }
  Require(!data_.users.count(record.user_id), ErrorCode::kConflict,
          "user '" + record.user_id + "' is already enrolled");
  Require(record.face_class >= 0 && record.face_class < face_classes,
          ErrorCode::kContract,
          "face class " + std::to_string(record.face_class) +
              " is outside the face model's " + std::to_string(face_classes) +
              " classes");
  for (const auto& [id, r] : data_.users) {
    Require(r.face_class != record.face_class, ErrorCode::kConflict,
            "face class " + std::to_string(record.face_class) +
                " is already bound to '" + id + "'");
  }
  data_.face_fingerprint = face_fingerprint;
  data_.speaker_fingerprint = speaker_fingerprint;
  data_.face_classes = face_classes;
  data_.embedding_dim = static_cast<int64_t>(record.voice_template.dim());
  data_.users.emplace(record.user_id, record);
}

void EnrollmentStore::CheckBinding(uint64_t face_fingerprint,
                                   uint64_t speaker_fingerprint) const {
  std::shared_lock lock(mu_);
  Require(data_.face_fingerprint == face_fingerprint,
          ErrorCode::kFingerprint,
          "face model fingerprint " + FingerprintHex(face_fingerprint) +
              " does not match the store's " + FingerprintHex(data_.face_fingerprint));
  Require(data_.speaker_fingerprint == speaker_fingerprint, ErrorCode::kFingerprint,
          "speaker model fingerprint " + FingerprintHex(speaker_fingerprint) +
              " does not match the store's " +
              FingerprintHex(data_.speaker_fingerprint));
}

double EnrollmentStore::CompareWithTemplate(const std::string& user_id,
                                            const Embedding& probe) const {
  std::shared_lock lock(mu_);
  auto it = data_.users.find(user_id);
  Require(it != data_.users.end(), ErrorCode::kNotFound,
          "user '" + user_id + "' is not enrolled");
  comparisons_.fetch_add(1);
  return CosineSimilarity(probe, it->second.voice_template);
}

Pipeline Pipeline::FromModels(const FaceNet& face, const SpeakerNet& speaker,
                              const FeatureConfig& features) {
  Pipeline p;
  p.classify_face = [&face](const Image& image) { return face.Classify(image); };
  p.embed_voice = [&speaker, features](const AudioClip& clip) {
    return speaker.Embed(ExtractFbank(clip, features));
  };
  p.face_fingerprint = Fingerprint(face);
  p.speaker_fingerprint = Fingerprint(speaker);
  p.face_classes = face.spec().num_classes;
  return p;
}

EnrollmentRecord Enroll(EnrollmentStore& store, const EnrollRequest& request,
                        const Pipeline& pipeline) {
  CheckUserId(request.user_id);
  Require(!store.Contains(request.user_id), ErrorCode::kConflict,
          "user '" + request.user_id + "' is already enrolled");
  Require(!request.face_images.empty() && !request.voice_clips.empty(),
          ErrorCode::kContract, "enrollment needs at least one image and one clip");

  std::vector<int64_t> votes(static_cast<size_t>(std::max<int64_t>(pipeline.face_classes, 0)));
  for (const Image& image : request.face_images) {
    const FacePrediction p = pipeline.classify_face(image);
    if (p.label >= 0 && p.label < static_cast<int64_t>(votes.size())) ++votes[p.label];
  }
  EnrollmentRecord record;
  record.user_id = request.user_id;
  record.face_class = request.face_class >= 0
                          ? request.face_class
                          : std::max_element(votes.begin(), votes.end()) - votes.begin();
  record.enrolled_at = request.enrolled_at;
  record.face_samples = static_cast<int64_t>(request.face_images.size());
  record.voice_samples = static_cast<int64_t>(request.voice_clips.size());

  std::vector<Embedding> embeddings;
  for (const AudioClip& clip : request.voice_clips) {
    embeddings.push_back(pipeline.embed_voice(clip));
  }
  record.voice_template = MeanEmbedding(embeddings);
  store.Add(record, pipeline.face_fingerprint, pipeline.speaker_fingerprint,
            pipeline.face_classes);
  return record;
}

FaceMatch IdentifyFace(const EnrollmentStore& store, const Image& image,
                       const Pipeline& pipeline, double tau_face) {
  FaceMatch match;
  match.prediction = pipeline.classify_face(image);
  if (match.prediction.confidence < tau_face) return match;
  auto record = store.FindByFaceClass(match.prediction.label);
  Require(record.has_value(), ErrorCode::kUnmappedClass,
          "face class " + std::to_string(match.prediction.label) +
              " has no enrolled user");
  match.user_id = record->user_id;
  return match;
}

VoiceMatch VerifyVoice(const EnrollmentStore& store, const std::string& user_id,
                       const AudioClip& clip, const Pipeline& pipeline,
                       double tau_voice) {
  Require(store.Contains(user_id), ErrorCode::kNotFound,
          "user '" + user_id + "' is not enrolled");
  const Embedding probe = pipeline.embed_voice(clip);
  VoiceMatch match;
  match.score = store.CompareWithTemplate(user_id, probe);
  match.accepted = match.score >= tau_voice;
  return match;
}

const char* OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAccept:
      return "accept";
    case Outcome::kRejectFace:
      return "reject_face";
    case Outcome::kRejectVoice:
      return "reject_voice";
    case Outcome::kError:
      return "error";
  }
  return "?";
}

VerificationDecision Authenticate(const EnrollmentStore& store, const Image& image,
                                  const AudioClip& clip, const Pipeline& pipeline,
                                  const Thresholds& thresholds) {
  VerificationDecision d;
  d.thresholds = thresholds;
  try {
    Require(store.size() > 0, ErrorCode::kContract, "enrollment store is empty");
    store.CheckBinding(pipeline.face_fingerprint, pipeline.speaker_fingerprint);
    const FaceMatch face = IdentifyFace(store, image, pipeline, thresholds.face);
    d.face_confidence = face.prediction.confidence;
    d.face_class = face.prediction.label;
    if (!face.user_id) {
      d.outcome = Outcome::kRejectFace;
      return d;
    }
    d.claimed_identity = face.user_id;
    const VoiceMatch voice = VerifyVoice(store, *face.user_id, clip, pipeline,
                                         thresholds.voice);
    d.voice_score = voice.score;
    d.outcome = voice.accepted ? Outcome::kAccept : Outcome::kRejectVoice;
  } catch (const Error& e) {
    d.outcome = Outcome::kError;
    d.error = e.code();
    d.error_message = e.what();
  }
  return d;
}

double FaceThresholdForTarget(std::span<const double> impostor, double far_target) {
  Require(!impostor.empty(), ErrorCode::kContract, "no impostor face confidences");
  Require(far_target >= 0.0 && far_target <= 1.0, ErrorCode::kContract,
          "false-accept target must lie in [0, 1]");
  for (double s : impostor) {
    Require(std::isfinite(s), ErrorCode::kContract, "non-finite face confidence");
  }
  const size_t n = impostor.size();
  // At most k impostors may reach the threshold.
  const auto k = static_cast<size_t>(std::floor(far_target * static_cast<double>(n) + 1e-9));
  if (k >= n) return 0.0;
  std::vector<double> sorted(impostor.begin(), impostor.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return std::nextafter(sorted[k], std::numeric_limits<double>::infinity());
}

Thresholds CalibrateThresholds(const ScoreSet& face_dev, const ScoreSet& voice_dev,
                               double face_far_target) {
  Require(!face_dev.genuine.empty() && !face_dev.impostor.empty(), ErrorCode::kContract,
          "face dev scores need both genuine and impostor trials");
  Thresholds t;
  t.voice = ComputeEer(voice_dev).threshold;
  t.face = FaceThresholdForTarget(face_dev.impostor, face_far_target);
  return t;
}

}  // namespace biogate
