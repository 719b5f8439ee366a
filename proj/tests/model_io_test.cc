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

#include <gtest/gtest.h>

#include <cstring>

#include "biogate/error.h"
#include "biogate/wav.h"
#include "test_util.h"

namespace biogate {
namespace {

template <typename Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kUsage;
}

FeatureMatrix RandomFeatures(int64_t frames, uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix f;
  f.frames = frames;
  f.dim = 64;
  f.values.resize(static_cast<size_t>(frames * 64));
  for (double& v : f.values) v = rng.Normal();
  return f;
}

Image RandomImage(int64_t size, uint64_t seed) {
  Rng rng(seed);
  Image img = Image::Blank(size, size, 3);
  for (double& p : img.pixels) p = rng.Uniform(0.0, 1.0);
  return img;
}

std::vector<uint8_t> ToyBytes() {
  return EncodeContainer(ToContainer(SpeakerNet::Build(SpeakerNetSpec::Toy(), 3)));
}

TEST(ModelIoTest, SpeakerRoundTripGivesBitIdenticalEmbedding) {
  const SpeakerNet net = SpeakerNet::Build(SpeakerNetSpec::Toy(), 11);
  const auto dir = testing::ScratchDir("model_io_speaker");
  const std::string path = (dir / "speaker.bgm").string();
  SaveModel(path, net);
  const SpeakerNet back = LoadSpeakerNet(path);
  EXPECT_EQ(back.spec(), net.spec());
  const FeatureMatrix f = RandomFeatures(40, 5);
  const Embedding a = net.Embed(f), b = back.Embed(f);
  ASSERT_EQ(a.dim(), b.dim());
  EXPECT_EQ(std::memcmp(a.values.data(), b.values.data(), a.dim() * sizeof(double)), 0);
}

TEST(ModelIoTest, FaceRoundTripGivesBitIdenticalProbabilities) {
  const FaceNet net = FaceNet::Build(FaceNetSpec::Toy(5), 4);
  const FaceNet back = FaceNetFromContainer(DecodeContainer(EncodeContainer(ToContainer(net))));
  const Image img = RandomImage(net.spec().input_size, 2);
  EXPECT_EQ(net.Classify(img).probs, back.Classify(img).probs);
}

TEST(ModelIoTest, LoadThenSaveIsByteIdentical) {
  const auto bytes = ToyBytes();
  EXPECT_EQ(EncodeContainer(DecodeContainer(bytes)), bytes);
  const FaceNet face = FaceNet::Build(FaceNetSpec::Toy(3), 1);
  const auto face_bytes = EncodeContainer(ToContainer(face));
  EXPECT_EQ(EncodeContainer(ToContainer(FaceNetFromContainer(DecodeContainer(face_bytes)))),
            face_bytes);
}

TEST(ModelIoTest, HeaderLayout) {
  const auto bytes = ToyBytes();
  ASSERT_GT(bytes.size(), 10u);
  EXPECT_EQ(std::memcmp(bytes.data(), "BGM1", 4), 0);
  EXPECT_EQ(bytes[4], kModelFormatVersion);
  EXPECT_EQ(bytes[5], static_cast<uint8_t>(ModelKind::kSpeaker));
  const uint32_t manifest_len = bytes[6] | bytes[7] << 8 | bytes[8] << 16 |
                                static_cast<uint32_t>(bytes[9]) << 24;
  EXPECT_EQ(manifest_len, SpeakerNetSpec::Toy().ToManifest().size());
}

TEST(ModelIoTest, EveryTruncationIsIntegrityError) {
  const auto bytes = ToyBytes();
  Rng rng(8);
  std::vector<size_t> lengths = {0, 1, 3, 4, 5, 12, bytes.size() - 8, bytes.size() - 1};
  for (int i = 0; i < 50; ++i) lengths.push_back(rng.Below(bytes.size()));
  for (size_t n : lengths) {
    std::span<const uint8_t> prefix(bytes.data(), n);
    EXPECT_EQ(CodeOf([&] { DecodeContainer(prefix); }), ErrorCode::kIntegrity) << n;
  }
}

TEST(ModelIoTest, EverySingleByteFlipIsDetected) {
  const auto bytes = ToyBytes();
  Rng rng(9);
  std::vector<size_t> positions = {0, 3, 4, 5, 6, bytes.size() - 1};
  for (int i = 0; i < 200; ++i) positions.push_back(rng.Below(bytes.size()));
  for (size_t pos : positions) {
    auto corrupt = bytes;
    corrupt[pos] ^= static_cast<uint8_t>(1 + rng.Below(255));
    const ErrorCode code = CodeOf([&] { DecodeContainer(corrupt); });
    EXPECT_EQ(code, pos < 4 ? ErrorCode::kFormat : ErrorCode::kIntegrity) << pos;
  }
}

TEST(ModelIoTest, NewerVersionIsVersionError) {
  auto c = DecodeContainer(ToyBytes());
  c.version = 2;
  const auto bytes = EncodeContainer(c);
  EXPECT_EQ(CodeOf([&] { DecodeContainer(bytes); }), ErrorCode::kVersion);
}

TEST(ModelIoTest, AffineShapeDisagreeingWithSpecIsSpecMismatch) {
  // Spec reaching 4 x 512 = 2048 features; the stored affine is 1024 x 512.
  SpeakerNetSpec spec;
  spec.channels = {8, 16, 32, 512};
  spec.blocks_per_stage = 0;
  spec.affine_in = 2048;
  auto c = ToContainer(SpeakerNet::Skeleton(spec));
  bool patched = false;
  for (auto& t : c.tensors) {
    if (t.name == "affine.weight") {
      ASSERT_EQ(t.shape, (Shape{2048, 512}));
      t.shape = {1024, 512};
      t.values.resize(1024 * 512);
      patched = true;
    }
  }
  ASSERT_TRUE(patched);
  const auto bytes = EncodeContainer(c);
  EXPECT_EQ(CodeOf([&] { SpeakerNetFromContainer(DecodeContainer(bytes)); }),
            ErrorCode::kSpecMismatch);
}

TEST(ModelIoTest, StructuralMismatchesAreSpecMismatch) {
  const auto base = DecodeContainer(ToyBytes());
  auto missing = base;
  missing.tensors.pop_back();
  EXPECT_EQ(CodeOf([&] { SpeakerNetFromContainer(missing); }), ErrorCode::kSpecMismatch);
  auto renamed = base;
  renamed.tensors[0].name = "stage9.conv.weight";
  EXPECT_EQ(CodeOf([&] { SpeakerNetFromContainer(renamed); }), ErrorCode::kSpecMismatch);
  auto bad_manifest = base;
  bad_manifest.manifest = "speaker-net\nn_mels 64\n";
  EXPECT_EQ(CodeOf([&] { SpeakerNetFromContainer(bad_manifest); }),
            ErrorCode::kSpecMismatch);
  auto invalid_spec = base;
  invalid_spec.manifest = SpeakerNetSpec::Full().ToManifest();
  invalid_spec.manifest.replace(invalid_spec.manifest.find("affine_in 2048"), 14,
                                "affine_in 2047");
  EXPECT_EQ(CodeOf([&] { SpeakerNetFromContainer(invalid_spec); }),
            ErrorCode::kSpecMismatch);
  EXPECT_EQ(CodeOf([&] { FaceNetFromContainer(base); }), ErrorCode::kSpecMismatch);
}

TEST(ModelIoTest, Float32RecordsAreWidened) {
  auto c = DecodeContainer(ToyBytes());
  for (auto& t : c.tensors) t.dtype = DType::kF32;
  const auto narrow = EncodeContainer(c);
  const auto back = DecodeContainer(narrow);
  for (size_t i = 0; i < c.tensors.size(); ++i) {
    EXPECT_EQ(back.tensors[i].dtype, DType::kF32);
    for (size_t k = 0; k < c.tensors[i].values.size(); ++k) {
      ASSERT_EQ(back.tensors[i].values[k],
                static_cast<double>(static_cast<float>(c.tensors[i].values[k])));
    }
  }
  EXPECT_NO_THROW(SpeakerNetFromContainer(back));
  EXPECT_LT(narrow.size(), ToyBytes().size());
}

TEST(ModelIoTest, FingerprintTracksValues) {
  SpeakerNet net = SpeakerNet::Build(SpeakerNetSpec::Toy(), 2);
  const uint64_t fp = Fingerprint(net);
  EXPECT_EQ(Fingerprint(net.Clone()), fp);
  EXPECT_EQ(fp, ContainerChecksum(EncodeContainer(ToContainer(net))));
  net.params().entries().back().value.mutable_data()[0] += 1e-12;
  EXPECT_NE(Fingerprint(net), fp);
  EXPECT_EQ(FingerprintHex(0x1234abcdULL), "000000001234abcd");
}

TEST(ModelIoTest, BadMagicIsFormatError) {
  const std::vector<uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0, 0, 0};
  EXPECT_EQ(CodeOf([&] { DecodeContainer(junk); }), ErrorCode::kFormat);
}

}  // namespace
}  // namespace biogate
