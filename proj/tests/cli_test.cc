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


#include "cli.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "biogate/authsys.h"
#include "biogate/error.h"
#include "biogate/fbank.h"
#include "biogate/model_io.h"
#include "biogate/synth.h"
#include "json.hpp"
#include "test_util.h"

namespace biogate {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out, err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "biogate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Result Synth(std::vector<std::string> args) {
  args.insert(args.begin(), "biogate-synth");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::RunSynth(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<uint8_t> Bytes(const fs::path& p) { return ReadFileBytes(p.string()); }

std::string Text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Value of the "<key> <value>" line in command output.
std::string Field(const std::string& output, const std::string& key) {
  std::istringstream in(output);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  ADD_FAILURE() << "no '" << key << "' in output:\n" << output;
  return "";
}

// Small corpora and models shared by the whole suite.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::ScratchDir("cli"));
    const fs::path& d = *dir_;
    ASSERT_EQ(Synth({"voice", "--out", (d / "voice").string(), "--speakers", "3",
                     "--train", "3", "--valid", "2", "--test", "2", "--seconds", "1.0"})
                  .code,
              0);
    ASSERT_EQ(Synth({"face", "--out", (d / "face").string(), "--identities", "3",
                     "--train", "4", "--valid", "1", "--test", "2", "--size", "40"})
                  .code,
              0);
    ASSERT_EQ(Cli(SpeakerTrainArgs(d / "spk")).code, 0);
    ASSERT_EQ(Cli(FaceTrainArgs(d / "face_model")).code, 0);
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::vector<std::string> SpeakerTrainArgs(const fs::path& out) {
    return {"train-speaker", "--manifest", (*dir_ / "voice/manifest.tsv").string(),
            "--out", out.string(), "--epochs", "1", "--minibatch", "6",
            "--speakers-per-batch", "3", "--chunk-frames", "32"};
  }
  static std::vector<std::string> FaceTrainArgs(const fs::path& out) {
    return {"train-face", "--manifest", (*dir_ / "face/manifest.tsv").string(),
            "--out", out.string(), "--epochs", "2", "--minibatch", "4"};
  }
  static std::vector<std::string> ModelArgs(const fs::path& store,
                                            const std::string& speaker = "spk") {
    return {"--store", store.string(),
            "--face-model", (*dir_ / "face_model/face.bgm").string(),
            "--speaker-model", (*dir_ / speaker / "speaker.bgm").string()};
  }
  static std::vector<std::string> Concat(std::vector<std::string> a,
                                         const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST(CliBasicsTest, InspectFullSpeakerSpec) {
  const Result r = Cli({"inspect", "--spec", "speaker-full"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1,049,088"), std::string::npos);
  EXPECT_NE(r.out.find("204,928"), std::string::npos);
  std::string total = Field(r.out, "total");
  total.erase(std::remove_if(total.begin(), total.end(),
                             [](char c) { return c == ',' || c == ' '; }),
              total.end());
  const int64_t n = std::stoll(total);
  EXPECT_GE(n, 16'600'000);
  EXPECT_LE(n, 17'000'000);
}

TEST(CliBasicsTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"bogus"}).code, 2);
  EXPECT_EQ(Cli({"inspect", "--no-such-flag"}).code, 2);
  EXPECT_EQ(Cli({"features"}).code, 2);
  EXPECT_EQ(Cli({"inspect"}).code, 2);
  EXPECT_EQ(Cli({"inspect", "--spec", "nope"}).code, 2);
  const Result help = Cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("verify"), std::string::npos);
}

TEST(CliBasicsTest, EvalEerOnBundledExample) {
  const Result r = Cli({"eval-eer", "--scores", BIOGATE_DATA_DIR "/example_scores.tsv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Field(r.out, "eer"), "0.5");
}

TEST(CliBasicsTest, EngineErrorsMapToTheirCodes) {
  const auto dir = testing::ScratchDir("cli_errors");
  EXPECT_EQ(Cli({"eval-eer", "--scores", (dir / "missing.tsv").string()}).code,
            static_cast<int>(ErrorCode::kIo));
  { std::ofstream(dir / "one_sided.tsv") << "genuine\t0.5\n"; }
  EXPECT_EQ(Cli({"eval-eer", "--scores", (dir / "one_sided.tsv").string()}).code,
            static_cast<int>(ErrorCode::kContract));
  { std::ofstream(dir / "junk.wav") << "not a wav file at all"; }
  EXPECT_EQ(Cli({"features", "--wav", (dir / "junk.wav").string()}).code,
            static_cast<int>(ErrorCode::kFormat));
}

TEST_F(CliTest, FeaturesDumpMatchesLibrary) {
  const fs::path wav = *dir_ / "voice/spk00/utt000.wav";
  const fs::path dump = *dir_ / "features.txt";
  ASSERT_EQ(Cli({"features", "--wav", wav.string(), "--out", dump.string()}).code, 0);
  std::ifstream in(dump);
  const FeatureMatrix back = ReadFeatureDump(in);
  const FeatureMatrix direct = ExtractFbank(ReadWavFile(wav.string()));
  EXPECT_EQ(back.frames, direct.frames);
  ASSERT_EQ(back.values.size(), direct.values.size());
  // The dump holds 9 significant digits.
  for (size_t i = 0; i < back.values.size(); ++i) {
    ASSERT_NEAR(back.values[i], direct.values[i], 1e-8 * (1 + std::abs(direct.values[i])));
  }
  const Result stdout_dump = Cli({"features", "--wav", wav.string(), "--no-vad"});
  ASSERT_EQ(stdout_dump.code, 0);
  std::istringstream s(stdout_dump.out);
  FeatureConfig no_vad;
  no_vad.apply_vad = false;
  EXPECT_EQ(ReadFeatureDump(s).frames, ExtractFbank(ReadWavFile(wav.string()), no_vad).frames);
}

TEST_F(CliTest, TrainSpeakerIsDeterministicAndEchoesConfig) {
  const fs::path a = *dir_ / "spk";
  const fs::path b = *dir_ / "spk_again";
  ASSERT_EQ(Cli(SpeakerTrainArgs(b)).code, 0);
  EXPECT_EQ(Bytes(a / "speaker.bgm"), Bytes(b / "speaker.bgm"));
  EXPECT_EQ(Bytes(a / "history.tsv"), Bytes(b / "history.tsv"));
  const std::string config = Text(a / "run_config.ini");
  EXPECT_EQ(config.rfind("[train-speaker]\n", 0), 0u);
  EXPECT_NE(config.find("chunk-frames=32"), std::string::npos);
  // Replaying the echoed config reproduces the model.
  const fs::path c = *dir_ / "spk_replay";
  ASSERT_EQ(Cli({"--config", (a / "run_config.ini").string(), "train-speaker", "--out",
                 c.string()})
                .code,
            0);
  EXPECT_EQ(Bytes(a / "speaker.bgm"), Bytes(c / "speaker.bgm"));
}

TEST_F(CliTest, CommandLineOverridesConfigFile) {
  const fs::path c = *dir_ / "spk_seed2";
  ASSERT_EQ(Cli({"--config", (*dir_ / "spk/run_config.ini").string(), "train-speaker",
                 "--out", c.string(), "--seed", "2"})
                .code,
            0);
  EXPECT_NE(Text(c / "run_config.ini").find("seed=2"), std::string::npos);
  EXPECT_NE(Bytes(*dir_ / "spk/speaker.bgm"), Bytes(c / "speaker.bgm"));
}

TEST_F(CliTest, TrainFaceIsDeterministic) {
  const fs::path b = *dir_ / "face_again";
  ASSERT_EQ(Cli(FaceTrainArgs(b)).code, 0);
  EXPECT_EQ(Bytes(*dir_ / "face_model/face.bgm"), Bytes(b / "face.bgm"));
  EXPECT_EQ(Bytes(*dir_ / "face_model/history.tsv"), Bytes(b / "history.tsv"));
  EXPECT_EQ(Text(b / "labels.txt"), "id0\nid1\nid2\n");
}

TEST_F(CliTest, EvalFaceWritesConsistentReport) {
  const fs::path out = *dir_ / "eval_face";
  const Result r = Cli({"eval-face", "--model", (*dir_ / "face_model/face.bgm").string(),
                        "--manifest", (*dir_ / "face/manifest.tsv").string(), "--out",
                        out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "confusion.tsv"));
  EXPECT_TRUE(fs::exists(out / "report.tsv"));
  std::ifstream scores(out / "face_scores.tsv");
  const ScoreSet s = ReadScores(scores);
  EXPECT_EQ(s.genuine.size() + s.impostor.size(), 6u);
  const double accuracy = std::stod(Field(r.out, "accuracy"));
  EXPECT_NEAR(accuracy, static_cast<double>(s.genuine.size()) / 6.0, 1e-9);
}

TEST_F(CliTest, EvalEerFromModelAndManifest) {
  const fs::path scores = *dir_ / "voice_scores.tsv";
  const Result r = Cli({"eval-eer", "--model", (*dir_ / "spk/speaker.bgm").string(),
                        "--manifest", (*dir_ / "voice/manifest.tsv").string(),
                        "--scores-out", scores.string(), "--det",
                        (*dir_ / "det.tsv").string(), "--det-points", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  // 6 test utterances over 3 speakers: 3 genuine and 12 impostor pairs.
  EXPECT_EQ(Field(r.out, "genuine"), "3");
  EXPECT_EQ(Field(r.out, "impostor"), "12");
  const Result again = Cli({"eval-eer", "--scores", scores.string()});
  EXPECT_EQ(Field(again.out, "eer"), Field(r.out, "eer"));
  std::istringstream det(Text(*dir_ / "det.tsv"));
  int lines = 0;
  for (std::string line; std::getline(det, line);) ++lines;
  EXPECT_EQ(lines, 12);
}

TEST_F(CliTest, EnrollVerifyAndGuards) {
  const fs::path store = *dir_ / "users.bgs";
  fs::remove(store);
  const auto enroll = Concat(
      {"enroll"}, Concat(ModelArgs(store),
                         {"--user", "ann", "--face-class", "0", "--enrolled-at", "42",
                          "--image", (*dir_ / "face/id0/img000.ppm").string(),
                          "--wav", (*dir_ / "voice/spk00/utt000.wav").string(),
                          "--wav", (*dir_ / "voice/spk00/utt001.wav").string()}));
  const Result e = Cli(enroll);
  ASSERT_EQ(e.code, 0) << e.err;
  const auto record = nlohmann::json::parse(e.out);
  EXPECT_EQ(record["user_id"], "ann");
  EXPECT_EQ(record["utterances"], 2);
  EXPECT_EQ(Cli(enroll).code, static_cast<int>(ErrorCode::kConflict));
  const auto stored = EnrollmentStore::Load(store.string());
  EXPECT_EQ(stored->Find("ann")->enrolled_at, 42);

  const std::vector<std::string> probe = {
      "--image", (*dir_ / "face/id0/img001.ppm").string(),
      "--wav", (*dir_ / "voice/spk00/utt000.wav").string()};
  // Face threshold 0 always passes; the probe clip is an enrollment clip.
  const Result v = Cli(Concat(Concat({"verify"}, ModelArgs(store)),
                              Concat(probe, {"--tau-face", "0", "--tau-voice", "-1"})));
  const auto d = nlohmann::json::parse(v.out);
  if (d["outcome"] == "error") {
    // Class 0 may not be the argmax of this barely trained model.
    EXPECT_EQ(d["error"]["code"], static_cast<int>(ErrorCode::kUnmappedClass));
    EXPECT_EQ(v.code, static_cast<int>(ErrorCode::kUnmappedClass));
  } else {
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(d["outcome"], "accept");
    EXPECT_EQ(d["claimed_identity"], "ann");
  }
  const Result reject = Cli(Concat(Concat({"verify"}, ModelArgs(store)),
                                   Concat(probe, {"--tau-face", "1.5"})));
  EXPECT_EQ(reject.code, 0);
  EXPECT_EQ(nlohmann::json::parse(reject.out)["outcome"], "reject_face");
  EXPECT_TRUE(nlohmann::json::parse(reject.out)["voice_score"].is_null());

  // A differently seeded speaker model has another fingerprint.
  ASSERT_EQ(Cli(Concat(SpeakerTrainArgs(*dir_ / "spk_other"), {"--seed", "2"})).code, 0);
  const Result mismatch =
      Cli(Concat(Concat({"verify"}, ModelArgs(store, "spk_other")), probe));
  EXPECT_EQ(mismatch.code, static_cast<int>(ErrorCode::kFingerprint));
  EXPECT_EQ(nlohmann::json::parse(mismatch.out)["error"]["name"], "fingerprint");
}

TEST_F(CliTest, CalibrateOutputFeedsVerify) {
  const fs::path face_scores = *dir_ / "face_dev.tsv";
  { std::ofstream(face_scores) << "genuine\t0.9\ngenuine\t0.8\nimpostor\t0.3\nimpostor\t0.6\n"; }
  const fs::path out = *dir_ / "thresholds.ini";
  const Result r = Cli({"calibrate", "--face-scores", face_scores.string(),
                        "--voice-scores", BIOGATE_DATA_DIR "/example_scores.tsv",
                        "--face-far-target", "0", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Text(out), r.out);
  EXPECT_NE(r.out.find("[verify]\ntau-face=0.60000000000000009\n"), std::string::npos);
  EXPECT_NE(r.out.find("tau-voice=0.5\n"), std::string::npos);
  const Result v = Cli(Concat({"--config", out.string(), "verify"},
                              Concat(ModelArgs(*dir_ / "users.bgs"),
                                     {"--image", (*dir_ / "face/id1/img000.ppm").string(),
                                      "--wav", (*dir_ / "voice/spk01/utt000.wav").string()})));
  const auto d = nlohmann::json::parse(v.out);
  EXPECT_DOUBLE_EQ(d["thresholds"]["face"].get<double>(), std::nextafter(0.6, 1.0));
  EXPECT_DOUBLE_EQ(d["thresholds"]["voice"].get<double>(), 0.5);
}

TEST_F(CliTest, InspectModelAndCorruption) {
  const fs::path model = *dir_ / "spk/speaker.bgm";
  const Result r = Cli({"inspect", "--model", model.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Field(r.out, "kind"), "speaker");
  EXPECT_EQ(Field(r.out, "fingerprint"),
            FingerprintHex(Fingerprint(LoadSpeakerNet(model.string()))));
  auto bytes = Bytes(model);
  bytes[bytes.size() / 2] ^= 1;
  const fs::path bad = *dir_ / "corrupt.bgm";
  WriteFileBytes(bad.string(), bytes);
  EXPECT_EQ(Cli({"inspect", "--model", bad.string()}).code,
            static_cast<int>(ErrorCode::kIntegrity));
}

TEST_F(CliTest, SynthIsDeterministic) {
  const fs::path a = *dir_ / "synth_a";
  const fs::path b = *dir_ / "synth_b";
  for (const auto& d : {a, b}) {
    ASSERT_EQ(Synth({"voice", "--out", d.string(), "--speakers", "2", "--train", "2",
                     "--valid", "0", "--test", "0", "--seconds", "0.5", "--seed", "9"})
                  .code,
              0);
  }
  EXPECT_EQ(Bytes(a / "manifest.tsv"), Bytes(b / "manifest.tsv"));
  EXPECT_EQ(Bytes(a / "spk01/utt001.wav"), Bytes(b / "spk01/utt001.wav"));
  EXPECT_EQ(Synth({"nope"}).code, 2);
}

}  // namespace
}  // namespace biogate
