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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "biogate/authsys.h"
#include "biogate/dataset.h"
#include "biogate/error.h"
#include "biogate/face_net.h"
#include "biogate/fbank.h"
#include "biogate/image.h"
#include "biogate/metrics.h"
#include "biogate/model_io.h"
#include "biogate/speaker_net.h"
#include "biogate/synth.h"
#include "biogate/training.h"
#include "biogate/wav.h"
#include "json.hpp"

namespace biogate::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kInternalFailure = 1;

struct FeatureArgs {
  FeatureConfig config;
  bool no_vad = false;
  bool no_cmvn = false;

  FeatureConfig Resolved() const {
    FeatureConfig c = config;
    c.apply_vad = !no_vad;
    c.normalize = !no_cmvn;
    return c;
  }
};

void AddFeatureOptions(CLI::App* app, FeatureArgs& f) {
  app->add_option("--n-mels", f.config.n_mels, "Mel filters per frame")
      ->capture_default_str()
      ->check(CLI::Range(1, 512));
  app->add_option("--vad-db", f.config.vad_threshold_db,
                  "Drop frames this many dB below the loudest frame")
      ->capture_default_str();
  app->add_flag("--no-vad", f.no_vad, "Keep silent frames")->capture_default_str();
  app->add_flag("--no-cmvn", f.no_cmvn, "Skip per-utterance normalization")
      ->capture_default_str();
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

fs::path MakeOutDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec && fs::is_directory(dir), ErrorCode::kIo, "cannot create directory " + dir);
  return fs::path(dir);
}

// The resolved options of the executed command, written next to its outputs
// in a form `--config` accepts.
void EchoConfig(const CLI::App& command, const fs::path& dir) {
  OpenOut(dir / "run_config.ini") << '[' << command.get_name() << "]\n"
                                  << command.config_to_str(true, false);
}

AudioClip LoadClip(const std::string& path) { return ReadWavFile(path); }

FeatureMatrix LoadFeatures(const std::string& path, const FeatureConfig& config) {
  return ExtractFbank(LoadClip(path), config);
}

// Optional detector crop, then resize to the model's square input.
Image LoadFace(const std::string& path, int64_t size, const std::string& detector) {
  Image img = ToRgb(ReadImageFile(path));
  if (!detector.empty()) img = Crop(img, RunDetector(detector, path));
  if (img.height != size || img.width != size) img = Resize(img, size, size);
  return img;
}

std::vector<LabeledFeatures> LoadVoiceSplit(const DatasetManifest& manifest, Split split,
                                            const FeatureConfig& config) {
  std::vector<LabeledFeatures> out;
  for (const auto& e : manifest.InSplit(split)) {
    out.push_back({LoadFeatures(e.path, config), manifest.LabelIndex(e.label)});
  }
  return out;
}

std::vector<LabeledImage> LoadFaceSplit(const DatasetManifest& manifest, Split split,
                                        const std::vector<std::string>& labels,
                                        int64_t size, const std::string& detector) {
  std::vector<LabeledImage> out;
  for (const auto& e : manifest.InSplit(split)) {
    auto it = std::find(labels.begin(), labels.end(), e.label);
    Require(it != labels.end(), ErrorCode::kNotFound,
            "label '" + e.label + "' is not one of the model's classes");
    out.push_back({LoadFace(e.path, size, detector), it - labels.begin()});
  }
  return out;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

ScoreSet ReadScoreFile(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open " + path);
  return ReadScores(in);
}

Mining ParseMining(const std::string& name) {
  if (name == "semihard") return Mining::kSemiHard;
  if (name == "all") return Mining::kAll;
  Fail(ErrorCode::kUsage, "unknown mining strategy '" + name + "'");
}

SpeakerNetSpec SpeakerSpecFor(const std::string& scale, int64_t n_mels) {
  SpeakerNetSpec spec = scale == "full" ? SpeakerNetSpec::Full() : SpeakerNetSpec::Toy();
  spec.n_mels = n_mels;
  spec.affine_in = spec.FrequencyAfterStages() * spec.channels.back();
  return spec;
}

FaceNetSpec FaceSpecFor(const std::string& scale, int64_t classes) {
  return scale == "full" ? FaceNetSpec::Full(classes) : FaceNetSpec::Toy(classes);
}

std::string WithThousands(int64_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(i, ",");
  return s;
}

void PrintReport(std::ostream& out, const ParamReport& report) {
  out << std::left << std::setw(10) << "layer" << std::setw(40) << "structure"
      << std::setw(8) << "stride" << "params\n";
  for (const auto& l : report.layers) {
    std::string structure = l.structure;
    if (l.repeat > 1) structure += " x" + std::to_string(l.repeat);
    out << std::setw(10) << l.layer << std::setw(40) << structure << std::setw(8)
        << l.stride << WithThousands(l.total()) << '\n';
  }
  out << std::setw(58) << "total" << WithThousands(report.total) << '\n';
}

ordered_json ErrorJson(ErrorCode code, const std::string& message) {
  return {{"code", static_cast<int>(code)},
          {"name", std::string(ErrorCodeName(code))},
          {"message", message}};
}

ordered_json DecisionJson(const VerificationDecision& d) {
  ordered_json j;
  j["outcome"] = OutcomeName(d.outcome);
  j["claimed_identity"] =
      d.claimed_identity ? ordered_json(*d.claimed_identity) : ordered_json(nullptr);
  j["face_class"] = d.face_class;
  j["face_confidence"] = d.face_confidence;
  j["voice_score"] = d.voice_score ? ordered_json(*d.voice_score) : ordered_json(nullptr);
  j["thresholds"] = {{"face", d.thresholds.face}, {"voice", d.thresholds.voice}};
  if (d.error) j["error"] = ErrorJson(*d.error, d.error_message);
  return j;
}

struct FeaturesArgs {
  std::string wav, out;
  FeatureArgs features;
};

int DoFeatures(const FeaturesArgs& a, std::ostream& out) {
  const FeatureMatrix f = LoadFeatures(a.wav, a.features.Resolved());
  if (a.out.empty() || a.out == "-") {
    WriteFeatureDump(out, f);
  } else {
    auto file = OpenOut(a.out);
    WriteFeatureDump(file, f);
  }
  return 0;
}

struct TrainSpeakerArgs {
  std::string manifest, out_dir, scale = "toy", mining = "semihard";
  FeatureArgs features;
  TrainConfig train;
};

int DoTrainSpeaker(const TrainSpeakerArgs& a, const CLI::App& command, std::ostream& out,
                   std::ostream& err) {
  TrainConfig config = a.train;
  config.mining = ParseMining(a.mining);
  config.Validate();
  const DatasetManifest manifest = ReadManifestFile(a.manifest);
  manifest.CheckTripletFeasible();
  const FeatureConfig features = a.features.Resolved();
  const auto train = LoadVoiceSplit(manifest, Split::kTrain, features);
  const auto valid = LoadVoiceSplit(manifest, Split::kValid, features);
  SpeakerNet net = SpeakerNet::Build(SpeakerSpecFor(a.scale, features.n_mels), config.seed);
  const fs::path dir = MakeOutDir(a.out_dir);
  EchoConfig(command, dir);
  const auto history = TrainSpeaker(net, train, valid, config, [&err](const SpeakerEpoch& e) {
    err << "epoch " << e.epoch << " steps " << e.steps << " loss " << e.mean_loss
        << " valid_eer " << e.valid_eer << '\n';
  });
  SaveModel((dir / "speaker.bgm").string(), net);
  auto hist = OpenOut(dir / "history.tsv");
  WriteSpeakerHistory(hist, history);
  out << "model " << (dir / "speaker.bgm").string() << '\n';
  if (!history.empty()) out << "valid_eer " << history.back().valid_eer << '\n';
  return 0;
}

struct TrainFaceArgs {
  std::string manifest, out_dir, scale = "toy", detector;
  FaceTrainConfig train;
};

int DoTrainFace(const TrainFaceArgs& a, const CLI::App& command, std::ostream& out,
                std::ostream& err) {
  a.train.Validate();
  const DatasetManifest manifest = ReadManifestFile(a.manifest);
  const auto labels = manifest.Labels();
  FaceNet net = FaceNet::Build(FaceSpecFor(a.scale, static_cast<int64_t>(labels.size())),
                               a.train.seed);
  const int64_t size = net.spec().input_size;
  const auto train = LoadFaceSplit(manifest, Split::kTrain, labels, size, a.detector);
  const auto valid = LoadFaceSplit(manifest, Split::kValid, labels, size, a.detector);
  const fs::path dir = MakeOutDir(a.out_dir);
  EchoConfig(command, dir);
  const auto history = TrainFace(net, train, valid, a.train, [&err](const FaceEpoch& e) {
    err << "epoch " << e.epoch << " train_loss " << e.train_loss << " valid_accuracy "
        << e.valid_accuracy << '\n';
  });
  SaveModel((dir / "face.bgm").string(), net);
  auto hist = OpenOut(dir / "history.tsv");
  WriteFaceHistory(hist, history);
  auto label_file = OpenOut(dir / "labels.txt");
  for (const auto& l : labels) label_file << l << '\n';
  out << "model " << (dir / "face.bgm").string() << '\n';
  if (!history.empty()) out << "valid_accuracy " << history.back().valid_accuracy << '\n';
  return 0;
}

struct EvalEerArgs {
  std::string scores, model, manifest, split = "test", det_out, scores_out;
  int det_points = 101;
  int64_t chunk_frames = 0;
  FeatureArgs features;
};

// Every unordered pair of utterances in the split: same label is genuine.
ScoreSet ScoreAllPairs(const SpeakerNet& net, std::span<const LabeledFeatures> data,
                       int64_t chunk_frames) {
  std::vector<Embedding> emb;
  for (const auto& d : data) {
    const FeatureMatrix& f = d.features;
    if (chunk_frames > 0 && f.frames > chunk_frames) {
      emb.push_back(net.Embed(f.Slice((f.frames - chunk_frames) / 2, chunk_frames)));
    } else {
      emb.push_back(net.Embed(f));
    }
  }
  ScoreSet s;
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t j = i + 1; j < data.size(); ++j) {
      const double score = CosineSimilarity(emb[i], emb[j]);
      (data[i].label == data[j].label ? s.genuine : s.impostor).push_back(score);
    }
  }
  return s;
}

int DoEvalEer(const EvalEerArgs& a, std::ostream& out) {
  ScoreSet scores;
  if (!a.scores.empty()) {
    scores = ReadScoreFile(a.scores);
  } else {
    Require(!a.model.empty() && !a.manifest.empty(), ErrorCode::kUsage,
            "eval-eer needs --scores, or --model with --manifest");
    const SpeakerNet net = LoadSpeakerNet(a.model);
    const auto data =
        LoadVoiceSplit(ReadManifestFile(a.manifest), ParseSplit(a.split), a.features.Resolved());
    scores = ScoreAllPairs(net, data, a.chunk_frames);
  }
  const EerResult eer = ComputeEer(scores);
  if (!a.scores_out.empty()) {
    auto f = OpenOut(a.scores_out);
    WriteScores(f, scores);
  }
  if (!a.det_out.empty()) {
    auto f = OpenOut(a.det_out);
    WriteDet(f, DetCurve(scores, a.det_points));
  }
  out << "eer " << eer.eer << '\n'
      << "threshold " << eer.threshold << '\n'
      << "accuracy " << PairAccuracy(scores, eer.threshold) << '\n'
      << "genuine " << scores.genuine.size() << '\n'
      << "impostor " << scores.impostor.size() << '\n';
  return 0;
}

struct EvalFaceArgs {
  std::string model, manifest, split = "test", labels, out_dir, detector;
};

int DoEvalFace(const EvalFaceArgs& a, const CLI::App& command, std::ostream& out) {
  const FaceNet net = LoadFaceNet(a.model);
  const DatasetManifest manifest = ReadManifestFile(a.manifest);
  std::vector<std::string> labels;
  const fs::path beside = fs::path(a.model).parent_path() / "labels.txt";
  if (!a.labels.empty()) {
    labels = ReadLines(a.labels);
  } else if (fs::exists(beside)) {
    labels = ReadLines(beside.string());
  } else {
    labels = manifest.Labels();
  }
  Require(static_cast<int64_t>(labels.size()) == net.spec().num_classes,
          ErrorCode::kSpecMismatch,
          std::to_string(labels.size()) + " labels for a " +
              std::to_string(net.spec().num_classes) + "-class model");
  const auto data = LoadFaceSplit(manifest, ParseSplit(a.split), labels,
                                  net.spec().input_size, a.detector);
  Require(!data.empty(), ErrorCode::kContract, "no images in split " + a.split);
  std::vector<int64_t> preds, truth;
  ScoreSet face_scores;
  for (const auto& d : data) {
    const FacePrediction p = net.Classify(d.image);
    preds.push_back(p.label);
    truth.push_back(d.label);
    (p.label == d.label ? face_scores.genuine : face_scores.impostor)
        .push_back(p.confidence);
  }
  const ConfusionMatrix cm =
      Confusion(preds, truth, static_cast<int64_t>(labels.size()));
  const ClassificationMetrics m = ComputeClassificationMetrics(cm);
  if (!a.out_dir.empty()) {
    const fs::path dir = MakeOutDir(a.out_dir);
    EchoConfig(command, dir);
    auto c = OpenOut(dir / "confusion.tsv");
    WriteConfusion(c, cm);
    auto r = OpenOut(dir / "report.tsv");
    WriteClassificationReport(r, m);
    auto s = OpenOut(dir / "face_scores.tsv");
    WriteScores(s, face_scores);
  }
  out << "accuracy " << m.accuracy << '\n'
      << "macro_precision " << m.macro_precision << '\n'
      << "macro_recall " << m.macro_recall << '\n'
      << "macro_f1 " << m.macro_f1 << '\n'
      << "micro_f1 " << m.micro_f1 << '\n';
  return 0;
}

struct ModelPaths {
  std::string store, face_model, speaker_model, detector;
  FeatureArgs features;
};

void AddModelOptions(CLI::App* app, ModelPaths& m) {
  app->add_option("--store", m.store, "Enrollment store file")->required();
  app->add_option("--face-model", m.face_model, "Face model container")->required();
  app->add_option("--speaker-model", m.speaker_model, "Speaker model container")
      ->required();
  app->add_option("--detector", m.detector,
                  "Face detector command; prints 'x y w h' for the image path");
  AddFeatureOptions(app, m.features);
}

struct EnrollArgs {
  ModelPaths models;
  std::string user;
  std::vector<std::string> images, wavs;
  int64_t face_class = -1;
  int64_t enrolled_at = -1;
};

int DoEnroll(const EnrollArgs& a, std::ostream& out) {
  const FaceNet face = LoadFaceNet(a.models.face_model);
  const SpeakerNet speaker = LoadSpeakerNet(a.models.speaker_model);
  const Pipeline pipeline = Pipeline::FromModels(face, speaker, a.models.features.Resolved());
  std::unique_ptr<EnrollmentStore> store = fs::exists(a.models.store)
                                               ? EnrollmentStore::Load(a.models.store)
                                               : std::make_unique<EnrollmentStore>();
  EnrollRequest request;
  request.user_id = a.user;
  request.face_class = a.face_class;
  request.enrolled_at =
      a.enrolled_at >= 0
          ? a.enrolled_at
          : std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  for (const auto& path : a.images) {
    request.face_images.push_back(LoadFace(path, face.spec().input_size, a.models.detector));
  }
  for (const auto& path : a.wavs) request.voice_clips.push_back(LoadClip(path));
  const EnrollmentRecord r = Enroll(*store, request, pipeline);
  store->Save(a.models.store);
  ordered_json j = {{"user_id", r.user_id},
                    {"face_class", r.face_class},
                    {"enrolled_at", r.enrolled_at},
                    {"faces", r.face_samples},
                    {"utterances", r.voice_samples},
                    {"store_users", store->size()}};
  out << j.dump(2) << '\n';
  return 0;
}

struct VerifyArgs {
  ModelPaths models;
  std::string image, wav;
  Thresholds thresholds;
};

int DoVerify(const VerifyArgs& a, std::ostream& out) {
  VerificationDecision d;
  d.thresholds = a.thresholds;
  try {
    const auto store = EnrollmentStore::Load(a.models.store);
    const FaceNet face = LoadFaceNet(a.models.face_model);
    const SpeakerNet speaker = LoadSpeakerNet(a.models.speaker_model);
    const Pipeline pipeline = Pipeline::FromModels(face, speaker, a.models.features.Resolved());
    const Image image = LoadFace(a.image, face.spec().input_size, a.models.detector);
    const AudioClip clip = LoadClip(a.wav);
    d = Authenticate(*store, image, clip, pipeline, a.thresholds);
  } catch (const Error& e) {
    d.outcome = Outcome::kError;
    d.error = e.code();
    d.error_message = e.what();
  }
  out << DecisionJson(d).dump(2) << '\n';
  return d.error ? static_cast<int>(*d.error) : 0;
}

struct CalibrateArgs {
  std::string face_scores, voice_scores, out;
  double face_far_target = 0.05;
};

int DoCalibrate(const CalibrateArgs& a, std::ostream& out) {
  const Thresholds t = CalibrateThresholds(ReadScoreFile(a.face_scores),
                                           ReadScoreFile(a.voice_scores),
                                           a.face_far_target);
  std::ostringstream ini;
  ini << std::setprecision(17) << "[verify]\n"
      << "tau-face=" << t.face << '\n'
      << "tau-voice=" << t.voice << '\n';
  if (!a.out.empty()) OpenOut(a.out) << ini.str();
  out << ini.str();
  return 0;
}

struct InspectArgs {
  std::string model, spec;
  int64_t classes = 5;
};

int DoInspect(const InspectArgs& a, std::ostream& out) {
  Require(a.model.empty() != a.spec.empty(), ErrorCode::kUsage,
          "inspect needs exactly one of --model or --spec");
  if (!a.model.empty()) {
    const ModelContainer c = ReadContainerFile(a.model);
    out << "kind " << ModelKindName(c.kind) << '\n'
        << "fingerprint " << FingerprintHex(ContainerChecksum(ReadFileBytes(a.model)))
        << '\n';
    if (c.kind == ModelKind::kSpeaker) {
      PrintReport(out, SpeakerNetFromContainer(c).CountParams());
    } else {
      PrintReport(out, FaceNetFromContainer(c).CountParams());
    }
    return 0;
  }
  if (a.spec == "speaker-full" || a.spec == "speaker-toy") {
    const auto spec = a.spec == "speaker-full" ? SpeakerNetSpec::Full() : SpeakerNetSpec::Toy();
    PrintReport(out, SpeakerNet::Skeleton(spec).CountParams());
  } else if (a.spec == "face-full" || a.spec == "face-toy") {
    PrintReport(out, FaceNet::Skeleton(FaceSpecFor(a.spec == "face-full" ? "full" : "toy",
                                                   a.classes))
                         .CountParams());
  } else {
    Fail(ErrorCode::kUsage, "unknown spec '" + a.spec + "'");
  }
  return 0;
}

// Maps every failure to an exit status; see cli.h.
template <typename Fn>
int Guarded(CLI::App& app, int argc, const char* const* argv, std::ostream& out,
            std::ostream& err, Fn&& dispatch) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return static_cast<int>(ErrorCode::kUsage);
  }
  try {
    return dispatch();
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalFailure;
  }
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Face-then-voice biometric authentication engine", "biogate"};
  app.set_config("--config", "", "INI file of option values; flags override it");
  app.require_subcommand(1);

  FeaturesArgs features;
  auto* c_features = app.add_subcommand("features", "Dump filterbank features of a WAV file");
  c_features->add_option("--wav", features.wav)->required();
  c_features->add_option("--out", features.out, "Output file ('-' for stdout)");
  AddFeatureOptions(c_features, features.features);

  TrainSpeakerArgs ts;
  auto* c_ts = app.add_subcommand("train-speaker", "Train the speaker embedding model");
  c_ts->add_option("--manifest", ts.manifest)->required();
  c_ts->add_option("--out", ts.out_dir, "Output directory")->required();
  c_ts->add_option("--scale", ts.scale)->check(CLI::IsMember({"toy", "full"}))
      ->capture_default_str();
  c_ts->add_option("--epochs", ts.train.epochs)->capture_default_str();
  c_ts->add_option("--max-steps", ts.train.max_steps, "0 disables")->capture_default_str();
  c_ts->add_option("--minibatch", ts.train.minibatch)->capture_default_str();
  c_ts->add_option("--speakers-per-batch", ts.train.speakers_per_batch)
      ->capture_default_str();
  c_ts->add_option("--margin", ts.train.margin_alpha)->capture_default_str();
  c_ts->add_option("--lr", ts.train.adam.lr)->capture_default_str();
  c_ts->add_option("--chunk-frames", ts.train.chunk_frames)->capture_default_str();
  c_ts->add_option("--mining", ts.mining)->check(CLI::IsMember({"semihard", "all"}))
      ->capture_default_str();
  c_ts->add_option("--seed", ts.train.seed)->capture_default_str();
  AddFeatureOptions(c_ts, ts.features);

  TrainFaceArgs tf;
  auto* c_tf = app.add_subcommand("train-face", "Train the face identification model");
  c_tf->add_option("--manifest", tf.manifest)->required();
  c_tf->add_option("--out", tf.out_dir, "Output directory")->required();
  c_tf->add_option("--scale", tf.scale)->check(CLI::IsMember({"toy", "full"}))
      ->capture_default_str();
  c_tf->add_option("--epochs", tf.train.epochs)->capture_default_str();
  c_tf->add_option("--max-steps", tf.train.max_steps, "0 disables")->capture_default_str();
  c_tf->add_option("--minibatch", tf.train.minibatch)->capture_default_str();
  c_tf->add_option("--lr", tf.train.adam.lr)->capture_default_str();
  c_tf->add_option("--augment", tf.train.augment_multiplicity,
                   "Augmented copies per training image")
      ->capture_default_str();
  c_tf->add_option("--seed", tf.train.seed)->capture_default_str();
  c_tf->add_option("--detector", tf.detector);

  EvalEerArgs ee;
  auto* c_ee = app.add_subcommand("eval-eer", "Equal error rate and DET curve");
  c_ee->add_option("--scores", ee.scores, "Score file: 'genuine|impostor<TAB>score' lines");
  c_ee->add_option("--model", ee.model, "Speaker model, scored over all pairs of a split");
  c_ee->add_option("--manifest", ee.manifest);
  c_ee->add_option("--split", ee.split)->check(CLI::IsMember({"train", "valid", "test"}))
      ->capture_default_str();
  c_ee->add_option("--chunk-frames", ee.chunk_frames, "Centre chunk per utterance; 0 = all")
      ->capture_default_str();
  c_ee->add_option("--det", ee.det_out, "Write DET points here");
  c_ee->add_option("--det-points", ee.det_points)->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_ee->add_option("--scores-out", ee.scores_out, "Write the scores used here");
  AddFeatureOptions(c_ee, ee.features);

  EvalFaceArgs ef;
  auto* c_ef = app.add_subcommand("eval-face", "Confusion matrix and per-class metrics");
  c_ef->add_option("--model", ef.model)->required();
  c_ef->add_option("--manifest", ef.manifest)->required();
  c_ef->add_option("--split", ef.split)->check(CLI::IsMember({"train", "valid", "test"}))
      ->capture_default_str();
  c_ef->add_option("--labels", ef.labels, "Class labels, one per line, in class order");
  c_ef->add_option("--out", ef.out_dir, "Output directory");
  c_ef->add_option("--detector", ef.detector);

  EnrollArgs en;
  auto* c_en = app.add_subcommand("enroll", "Register a user in an enrollment store");
  AddModelOptions(c_en, en.models);
  c_en->add_option("--user", en.user)->required();
  c_en->add_option("--image", en.images, "Face image (repeatable)")->required();
  c_en->add_option("--wav", en.wavs, "Voice clip (repeatable)")->required();
  c_en->add_option("--face-class", en.face_class,
                   "Face class to bind; default is the majority prediction");
  c_en->add_option("--enrolled-at", en.enrolled_at,
                   "Enrollment time in Unix seconds; default now");

  VerifyArgs ve;
  auto* c_ve = app.add_subcommand("verify", "Authenticate a face image and voice clip");
  AddModelOptions(c_ve, ve.models);
  c_ve->add_option("--image", ve.image)->required();
  c_ve->add_option("--wav", ve.wav)->required();
  c_ve->add_option("--tau-face", ve.thresholds.face)->capture_default_str();
  c_ve->add_option("--tau-voice", ve.thresholds.voice)->capture_default_str();

  CalibrateArgs ca;
  auto* c_ca = app.add_subcommand("calibrate", "Choose operating thresholds from dev scores");
  c_ca->add_option("--face-scores", ca.face_scores)->required();
  c_ca->add_option("--voice-scores", ca.voice_scores)->required();
  c_ca->add_option("--face-far-target", ca.face_far_target)->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  c_ca->add_option("--out", ca.out, "Also write the thresholds here (usable as --config)");

  InspectArgs in;
  auto* c_in = app.add_subcommand("inspect", "Per-layer parameter counts");
  c_in->add_option("--model", in.model, "Model container");
  c_in->add_option("--spec", in.spec, "speaker-full, speaker-toy, face-full or face-toy");
  c_in->add_option("--classes", in.classes, "Face classes for --spec face-*")
      ->capture_default_str();

  out << std::setprecision(10);
  err << std::setprecision(6);
  return Guarded(app, argc, argv, out, err, [&]() -> int {
    if (*c_features) return DoFeatures(features, out);
    if (*c_ts) return DoTrainSpeaker(ts, *c_ts, out, err);
    if (*c_tf) return DoTrainFace(tf, *c_tf, out, err);
    if (*c_ee) return DoEvalEer(ee, out);
    if (*c_ef) return DoEvalFace(ef, *c_ef, out);
    if (*c_en) return DoEnroll(en, out);
    if (*c_ve) return DoVerify(ve, out);
    if (*c_ca) return DoCalibrate(ca, out);
    if (*c_in) return DoInspect(in, out);
    Fail(ErrorCode::kUsage, "no command given");
  });
}

int RunSynth(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic voice and face corpora", "biogate-synth"};
  app.require_subcommand(1);

  VoiceCorpusConfig voice;
  std::string voice_dir;
  auto* c_voice = app.add_subcommand("voice", "Write WAV utterances and manifest.tsv");
  c_voice->add_option("--out", voice_dir)->required();
  c_voice->add_option("--speakers", voice.speakers)->capture_default_str();
  c_voice->add_option("--train", voice.train_per_speaker)->capture_default_str();
  c_voice->add_option("--valid", voice.valid_per_speaker)->capture_default_str();
  c_voice->add_option("--test", voice.test_per_speaker)->capture_default_str();
  c_voice->add_option("--seconds", voice.seconds)->capture_default_str();
  c_voice->add_option("--sample-rate", voice.sample_rate)->capture_default_str();
  c_voice->add_option("--seed", voice.seed)->capture_default_str();

  FaceCorpusConfig face;
  std::string face_dir;
  auto* c_face = app.add_subcommand("face", "Write PPM images and manifest.tsv");
  c_face->add_option("--out", face_dir)->required();
  c_face->add_option("--identities", face.identities)->capture_default_str();
  c_face->add_option("--train", face.train_per_identity)->capture_default_str();
  c_face->add_option("--valid", face.valid_per_identity)->capture_default_str();
  c_face->add_option("--test", face.test_per_identity)->capture_default_str();
  c_face->add_option("--size", face.size)->capture_default_str();
  c_face->add_option("--seed", face.seed)->capture_default_str();

  return Guarded(app, argc, argv, out, err, [&]() -> int {
    if (*c_voice) {
      const auto corpus = MakeVoiceCorpus(voice);
      WriteVoiceCorpus(MakeOutDir(voice_dir).string(), corpus);
      out << "wrote " << corpus.clips.size() << " utterances to " << voice_dir << '\n';
      return 0;
    }
    const auto corpus = MakeFaceCorpus(face);
    WriteFaceCorpus(MakeOutDir(face_dir).string(), corpus);
    out << "wrote " << corpus.images.size() << " images to " << face_dir << '\n';
    return 0;
  });
}

}  // namespace biogate::cli
