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


#include "biogate/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "biogate/error.h"

namespace biogate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string Padded(int value, int width) {
  std::string s = std::to_string(value);
  return std::string(static_cast<size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

std::vector<double> RandomColor(Rng& rng, double lo, double hi) {
  return {rng.Uniform(lo, hi), rng.Uniform(lo, hi), rng.Uniform(lo, hi)};
}

bool InEllipse(double x, double y, double cx, double cy, double rx, double ry) {
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

void AddSyllable(const VoiceProfile& profile, Rng& rng, int sample_rate, size_t start,
                 size_t length, std::vector<double>& out) {
  const auto& base = profile.vowels[rng.Below(profile.vowels.size())];
  std::vector<double> formants = base;
  for (double& f : formants) f *= rng.Uniform(0.97, 1.03);
  const double f0_start = profile.f0 * rng.Uniform(0.95, 1.05);
  const double f0_end = f0_start * rng.Uniform(0.93, 1.07);
  const double f0_mid = 0.5 * (f0_start + f0_end);
  const double nyquist_guard = 0.45 * sample_rate;

  struct Partial {
    int k;
    double amp;
    double phase;
  };
  std::vector<Partial> partials;
  for (int k = 1; k * f0_mid < std::min(7000.0, nyquist_guard); ++k) {
    double amp = 0.0;
    for (size_t j = 0; j < formants.size(); ++j) {
      const double z = (k * f0_mid - formants[j]) / profile.bandwidth;
      amp += std::exp(-0.5 * z * z) / static_cast<double>(j + 1);
    }
    amp += 0.01 / k;
    if (amp > 1e-3) partials.push_back({k, amp, rng.Uniform(0, kTwoPi)});
  }

  const double ramp = 0.02 * sample_rate;
  double cycle_phase = 0.0;
  for (size_t i = 0; i < length && start + i < out.size(); ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(length);
    const double f0 = f0_start + (f0_end - f0_start) * frac;
    cycle_phase += kTwoPi * f0 / sample_rate;
    double env = 1.0;
    const double di = static_cast<double>(i), dl = static_cast<double>(length - i);
    if (di < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * di / ramp);
    if (dl < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * dl / ramp);
    double v = 0.0;
    for (const Partial& p : partials) v += p.amp * std::sin(p.k * cycle_phase + p.phase);
    out[start + i] += 0.1 * env * v;
  }
}

}  // namespace

std::vector<VoiceProfile> MakeVoiceProfiles(int speakers, uint64_t seed) {
  Rng rng(seed);
  std::vector<VoiceProfile> profiles(static_cast<size_t>(speakers));
  for (auto& p : profiles) {
    p.f0 = rng.Uniform(90.0, 260.0);
    p.bandwidth = rng.Uniform(70.0, 140.0);
    for (int v = 0; v < 3; ++v) {
      p.vowels.push_back({rng.Uniform(300, 900), rng.Uniform(900, 2500),
                          rng.Uniform(2300, 3500)});
    }
  }
  return profiles;
}

AudioClip SynthesizeUtterance(const VoiceProfile& profile, Rng& rng, double seconds,
                              int sample_rate) {
  Require(seconds > 0 && sample_rate > 0, ErrorCode::kContract,
          "utterance needs a positive duration and rate");
  AudioClip clip;
  clip.sample_rate = sample_rate;
  const auto n = static_cast<size_t>(std::lround(seconds * sample_rate));
  clip.samples.assign(n, 0.0);
  size_t pos = static_cast<size_t>(rng.Uniform(0.02, 0.08) * sample_rate);
  while (pos < n) {
    const auto len = static_cast<size_t>(rng.Uniform(0.12, 0.25) * sample_rate);
    AddSyllable(profile, rng, sample_rate, pos, len, clip.samples);
    pos += len + static_cast<size_t>(rng.Uniform(0.04, 0.10) * sample_rate);
  }
  for (double& s : clip.samples) s = std::clamp(s + 0.002 * rng.Uniform(-1, 1), -1.0, 1.0);
  return clip;
}

std::vector<FaceProfile> MakeFaceProfiles(int identities, uint64_t seed) {
  Rng rng(seed);
  std::vector<FaceProfile> profiles(static_cast<size_t>(identities));
  for (auto& p : profiles) {
    p.background = RandomColor(rng, 0.0, 1.0);
    const double tone = rng.Uniform(0.3, 0.95);
    p.skin = {tone, tone * rng.Uniform(0.7, 0.9), tone * rng.Uniform(0.5, 0.75)};
    p.hair = RandomColor(rng, 0.0, 0.6);
    p.eyes = RandomColor(rng, 0.0, 0.5);
    p.mouth = {rng.Uniform(0.5, 0.9), rng.Uniform(0.1, 0.35), rng.Uniform(0.1, 0.35)};
    p.face_rx = rng.Uniform(0.24, 0.34);
    p.face_ry = rng.Uniform(0.32, 0.42);
    p.eye_y = rng.Uniform(0.38, 0.48);
    p.eye_dx = rng.Uniform(0.08, 0.15);
    p.eye_r = rng.Uniform(0.03, 0.06);
    p.mouth_y = rng.Uniform(0.64, 0.74);
    p.mouth_w = rng.Uniform(0.08, 0.18);
    p.hair_line = rng.Uniform(0.2, 0.34);
    p.glasses = rng.Below(2) == 1;
  }
  return profiles;
}

Image RenderFace(const FaceProfile& p, Rng& rng, int64_t size) {
  Require(size >= 8, ErrorCode::kContract, "face render size must be at least 8");
  const double shift_x = rng.Uniform(-0.04, 0.04), shift_y = rng.Uniform(-0.04, 0.04);
  const double scale = rng.Uniform(0.95, 1.05);
  const double tilt = rng.Uniform(-5.0, 5.0) * std::numbers::pi / 180.0;
  const double cos_t = std::cos(tilt), sin_t = std::sin(tilt);
  std::vector<double> light = {rng.Uniform(0.9, 1.1), rng.Uniform(0.9, 1.1),
                               rng.Uniform(0.9, 1.1)};
  const double shade = rng.Uniform(-0.1, 0.1);

  Image img = Image::Blank(size, size, 3);
  for (int64_t y = 0; y < size; ++y) {
    for (int64_t x = 0; x < size; ++x) {
      // Into face coordinates: undo shift, scale and tilt about the centre.
      const double u0 = (static_cast<double>(x) + 0.5) / size - 0.5 - shift_x;
      const double v0 = (static_cast<double>(y) + 0.5) / size - 0.5 - shift_y;
      const double u = (cos_t * u0 + sin_t * v0) / scale + 0.5;
      const double v = (-sin_t * u0 + cos_t * v0) / scale + 0.5;

      const std::vector<double>* color = &p.background;
      const double top = 0.5 - p.face_ry;
      if (InEllipse(u, v, 0.5, 0.5, p.face_rx * 1.1, p.face_ry * 1.08) &&
          v < top + p.hair_line) {
        color = &p.hair;
      }
      if (InEllipse(u, v, 0.5, 0.5, p.face_rx, p.face_ry) && v >= top + p.hair_line * 0.8) {
        color = &p.skin;
        for (double side : {-1.0, 1.0}) {
          const double ex = 0.5 + side * p.eye_dx;
          const double d = std::hypot(u - ex, v - p.eye_y);
          if (d <= p.eye_r) color = &p.eyes;
          if (p.glasses && d > p.eye_r * 1.5 && d <= p.eye_r * 1.9) color = &p.hair;
        }
        if (std::abs(u - 0.5) <= p.mouth_w / 2 && std::abs(v - p.mouth_y) <= 0.02) {
          color = &p.mouth;
        }
      }
      for (int64_t c = 0; c < 3; ++c) {
        double value = (*color)[c] * light[c] * (1.0 + shade * (u - 0.5));
        value += 0.02 * rng.Normal();
        img.at(y, x, c) = std::clamp(value, 0.0, 1.0);
      }
    }
  }
  return img;
}

VoiceCorpus MakeVoiceCorpus(const VoiceCorpusConfig& config) {
  const auto profiles = MakeVoiceProfiles(config.speakers, config.seed);
  VoiceCorpus corpus;
  for (int s = 0; s < config.speakers; ++s) {
    Rng rng(config.seed * 1000003 + static_cast<uint64_t>(s) + 1);
    const std::string label = "spk" + Padded(s, 2);
    int index = 0;
    auto emit = [&](int count, Split split) {
      for (int i = 0; i < count; ++i) {
        corpus.clips.push_back(
            SynthesizeUtterance(profiles[s], rng, config.seconds, config.sample_rate));
        corpus.manifest.entries.push_back(
            {label + "/utt" + Padded(index++, 3) + ".wav", label, split});
      }
    };
    emit(config.train_per_speaker, Split::kTrain);
    emit(config.valid_per_speaker, Split::kValid);
    emit(config.test_per_speaker, Split::kTest);
  }
  return corpus;
}

FaceCorpus MakeFaceCorpus(const FaceCorpusConfig& config) {
  const auto profiles = MakeFaceProfiles(config.identities, config.seed);
  FaceCorpus corpus;
  for (int id = 0; id < config.identities; ++id) {
    Rng rng(config.seed * 1000033 + static_cast<uint64_t>(id) + 1);
    const std::string label = "id" + std::to_string(id);
    int index = 0;
    auto emit = [&](int count, Split split) {
      for (int i = 0; i < count; ++i) {
        corpus.images.push_back(RenderFace(profiles[id], rng, config.size));
        const std::string path = label + "/img" + Padded(index++, 3) + ".ppm";
        corpus.images.back().source_id = path;
        corpus.manifest.entries.push_back({path, label, split});
      }
    };
    emit(config.train_per_identity, Split::kTrain);
    emit(config.valid_per_identity, Split::kValid);
    emit(config.test_per_identity, Split::kTest);
  }
  return corpus;
}

namespace {

void WriteManifestTo(const std::filesystem::path& dir, const DatasetManifest& manifest) {
  std::ofstream out(dir / "manifest.tsv");
  Require(out.good(), ErrorCode::kIo, "cannot write manifest in " + dir.string());
  WriteManifest(out, manifest);
}

}  // namespace

void WriteVoiceCorpus(const std::string& dir, const VoiceCorpus& corpus) {
  const std::filesystem::path root(dir);
  for (size_t i = 0; i < corpus.clips.size(); ++i) {
    const auto path = root / corpus.manifest.entries[i].path;
    std::filesystem::create_directories(path.parent_path());
    WriteWavFile(path.string(), corpus.clips[i]);
  }
  WriteManifestTo(root, corpus.manifest);
}

void WriteFaceCorpus(const std::string& dir, const FaceCorpus& corpus) {
  const std::filesystem::path root(dir);
  for (size_t i = 0; i < corpus.images.size(); ++i) {
    const auto path = root / corpus.manifest.entries[i].path;
    std::filesystem::create_directories(path.parent_path());
    WriteImageFile(path.string(), corpus.images[i]);
  }
  WriteManifestTo(root, corpus.manifest);
}

}  // namespace biogate
