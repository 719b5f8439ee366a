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

#include "biogate/fbank.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "biogate/error.h"

namespace biogate {

namespace {

// FFTW planning is not thread-safe; executing an existing plan on new
// arrays is. Plans are created once per size and never destroyed.
fftw_plan RealForwardPlan(int n) {
  static std::mutex mu;
  static std::map<int, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<double> in(static_cast<size_t>(n));
  std::vector<std::complex<double>> out(static_cast<size_t>(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(
      n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  Require(plan != nullptr, ErrorCode::kContract, "fftw: planning failed");
  plans.emplace(n, plan);
  return plan;
}

std::vector<double> HammingWindow(int64_t length) {
  std::vector<double> w(static_cast<size_t>(length), 1.0);
  if (length == 1) return w;
  for (int64_t i = 0; i < length; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(length - 1));
  }
  return w;
}

void NormalizeColumns(FeatureMatrix& m) {
  const auto t = static_cast<double>(m.frames);
  for (int64_t d = 0; d < m.dim; ++d) {
    double mean = 0.0;
    for (int64_t i = 0; i < m.frames; ++i) mean += m.values[i * m.dim + d];
    mean /= t;
    double var = 0.0;
    for (int64_t i = 0; i < m.frames; ++i) {
      const double c = m.values[i * m.dim + d] - mean;
      var += c * c;
    }
    var /= t;
    const double stddev = std::sqrt(var);
    // A constant column (always the case for T == 1) is only centred.
    const double scale = stddev > 1e-12 ? 1.0 / stddev : 1.0;
    for (int64_t i = 0; i < m.frames; ++i) {
      double& v = m.values[i * m.dim + d];
      v = (v - mean) * scale;
    }
  }
}

}  // namespace

FeatureMatrix FeatureMatrix::Slice(int64_t start, int64_t length) const {
  Require(start >= 0 && length >= 1 && start + length <= frames,
          ErrorCode::kContract, "feature slice out of range");
  FeatureMatrix out = *this;
  out.frames = length;
  out.values.assign(values.begin() + start * dim,
                    values.begin() + (start + length) * dim);
  return out;
}

Tensor FeatureMatrix::ToTensor() const {
  std::vector<double> v(values.size());
  for (int64_t t = 0; t < frames; ++t) {
    for (int64_t d = 0; d < dim; ++d) v[d * frames + t] = values[t * dim + d];
  }
  return Tensor::FromVector({1, dim, frames}, std::move(v));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Frames FrameSignal(const AudioClip& clip, double window_s, double hop_s) {
  Require(clip.sample_rate > 0, ErrorCode::kContract, "sample rate must be positive");
  Require(hop_s > 0.0 && window_s >= hop_s, ErrorCode::kContract,
          "framing needs window >= hop > 0");
  const int64_t w = std::lround(window_s * clip.sample_rate);
  const int64_t h = std::lround(hop_s * clip.sample_rate);
  Require(w >= 1 && h >= 1, ErrorCode::kContract, "window or hop below one sample");
  const auto n = static_cast<int64_t>(clip.samples.size());
  Require(n >= w, ErrorCode::kTooShort,
          "clip of " + std::to_string(n) + " samples is shorter than one " +
              std::to_string(w) + "-sample window");

  Frames frames;
  frames.count = 1 + (n - w) / h;
  frames.length = w;
  frames.samples.resize(static_cast<size_t>(frames.count * w));
  for (int64_t i = 0; i < frames.count; ++i) {
    std::copy_n(clip.samples.begin() + i * h, w, frames.samples.begin() + i * w);
  }
  return frames;
}

std::vector<double> FrameLogEnergyDb(const Frames& frames) {
  std::vector<double> energy(static_cast<size_t>(frames.count));
  for (int64_t i = 0; i < frames.count; ++i) {
    double e = 0.0;
    for (double x : frames.frame(i)) e += x * x;
    energy[i] = e > 0.0 ? 10.0 * std::log10(e)
                        : -std::numeric_limits<double>::infinity();
  }
  return energy;
}

std::vector<bool> VadFilter(const Frames& frames, double threshold_db) {
  Require(frames.count >= 1, ErrorCode::kContract, "vad needs at least one frame");
  const std::vector<double> db = FrameLogEnergyDb(frames);
  const double peak = *std::max_element(db.begin(), db.end());
  Require(std::isfinite(peak), ErrorCode::kEmptyVoice,
          "no voiced frames: the signal is silent");
  std::vector<bool> keep(db.size());
  for (size_t i = 0; i < db.size(); ++i) {
    keep[i] = std::isfinite(db[i]) && db[i] >= peak - threshold_db;
  }
  return keep;
}

std::vector<double> MelFilterbank(int n_mels, int n_fft, int sample_rate) {
  Require(n_mels >= 1 && n_fft >= 2 && sample_rate > 0, ErrorCode::kContract,
          "invalid filterbank configuration");
  const int bins = n_fft / 2 + 1;
  const double mel_hi = HzToMel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<size_t>(n_mels + 2));
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_hi * i / (n_mels + 1));
  }
  const double bin_hz = static_cast<double>(sample_rate) / n_fft;

  std::vector<double> fb(static_cast<size_t>(n_mels * bins), 0.0);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    bool any = false;
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const double w = std::max(
          0.0, std::min((f - left) / (centre - left), (right - f) / (right - centre)));
      fb[m * bins + k] = w;
      any = any || w > 0.0;
    }
    // Filters narrower than one bin fall back to the bin nearest the centre.
    if (!any) {
      const int k = std::clamp(static_cast<int>(std::lround(centre / bin_hz)), 0,
                               bins - 1);
      fb[m * bins + k] = 1.0;
    }
  }
  return fb;
}

FeatureMatrix ExtractFbank(const AudioClip& clip, const FeatureConfig& config) {
  Require(config.n_mels >= 1 && config.n_fft >= 2, ErrorCode::kContract,
          "invalid feature configuration");
  const Frames frames = FrameSignal(clip, config.window_s, config.hop_s);
  Require(frames.length <= config.n_fft, ErrorCode::kContract,
          "fft size " + std::to_string(config.n_fft) + " is smaller than the " +
              std::to_string(frames.length) + "-sample window");

  std::vector<bool> keep(static_cast<size_t>(frames.count), true);
  if (config.apply_vad) {
    keep = VadFilter(frames, config.vad_threshold_db);
  } else {
    const auto db = FrameLogEnergyDb(frames);
    Require(std::any_of(db.begin(), db.end(), [](double e) { return std::isfinite(e); }),
            ErrorCode::kEmptyVoice, "no voiced frames: the signal is silent");
  }

  const int bins = config.n_fft / 2 + 1;
  const std::vector<double> fb =
      MelFilterbank(config.n_mels, config.n_fft, clip.sample_rate);
  const std::vector<double> window = HammingWindow(frames.length);
  const fftw_plan plan = RealForwardPlan(config.n_fft);

  FeatureMatrix out;
  out.dim = config.n_mels;
  out.frame_hop_s = config.hop_s;
  out.window_s = config.window_s;
  std::vector<double> buffer(static_cast<size_t>(config.n_fft));
  std::vector<std::complex<double>> spectrum(static_cast<size_t>(bins));
  std::vector<double> magnitude(static_cast<size_t>(bins));
  for (int64_t i = 0; i < frames.count; ++i) {
    if (!keep[i]) continue;
    auto frame = frames.frame(i);
    std::fill(buffer.begin(), buffer.end(), 0.0);
    for (int64_t j = 0; j < frames.length; ++j) buffer[j] = frame[j] * window[j];
    fftw_execute_dft_r2c(plan, buffer.data(),
                         reinterpret_cast<fftw_complex*>(spectrum.data()));
    for (int k = 0; k < bins; ++k) magnitude[k] = std::abs(spectrum[k]);
    for (int m = 0; m < config.n_mels; ++m) {
      double e = 0.0;
      for (int k = 0; k < bins; ++k) e += fb[m * bins + k] * magnitude[k];
      out.values.push_back(std::log(std::max(e, config.log_floor)));
    }
    ++out.frames;
  }
  if (config.normalize) NormalizeColumns(out);
  return out;
}

void WriteFeatureDump(std::ostream& out, const FeatureMatrix& features) {
  out << "fbank " << features.dim << ' ' << features.frames << '\n';
  std::ostringstream line;
  line << std::setprecision(9);
  for (int64_t t = 0; t < features.frames; ++t) {
    line.str("");
    for (int64_t d = 0; d < features.dim; ++d) {
      if (d) line << ' ';
      line << features.at(t, d);
    }
    out << line.str() << '\n';
  }
}

FeatureMatrix ReadFeatureDump(std::istream& in) {
  std::string tag;
  FeatureMatrix m;
  in >> tag >> m.dim >> m.frames;
  Require(in && tag == "fbank" && m.dim > 0 && m.frames > 0, ErrorCode::kFormat,
          "feature dump: bad header");
  m.values.resize(static_cast<size_t>(m.dim * m.frames));
  for (double& v : m.values) {
    in >> v;
    Require(static_cast<bool>(in), ErrorCode::kFormat, "feature dump: truncated");
  }
  return m;
}

}  // namespace biogate
