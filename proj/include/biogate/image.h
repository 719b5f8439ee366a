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


#ifndef BIOGATE_IMAGE_H_
#define BIOGATE_IMAGE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biogate/random.h"
#include "biogate/tensor.h"

namespace biogate {

// Interleaved H x W x C pixels in [0, 1], C in {1, 3}.
struct Image {
  int64_t height = 0;
  int64_t width = 0;
  int64_t channels = 0;
  std::vector<double> pixels;
  std::string source_id;

  static Image Blank(int64_t height, int64_t width, int64_t channels,
                     double value = 0.0);

  double at(int64_t y, int64_t x, int64_t c) const {
    return pixels[(y * width + x) * channels + c];
  }
  double& at(int64_t y, int64_t x, int64_t c) {
    return pixels[(y * width + x) * channels + c];
  }
  // [C, H, W] network input.
  Tensor ToTensor() const;
};

// Binary PGM (P5) or PPM (P6), maxval up to 65535.
Image ParseNetpbm(std::span<const uint8_t> bytes);
// P5 for one channel, P6 for three; 8-bit.
std::vector<uint8_t> EncodeNetpbm(const Image& image);
Image ReadImageFile(const std::string& path);
void WriteImageFile(const std::string& path, const Image& image);

// Grayscale is replicated across three channels.
Image ToRgb(const Image& image);

// Bilinear, half-pixel-centre sampling with edge clamping.
Image Resize(const Image& image, int64_t height, int64_t width);

Image FlipHorizontal(const Image& image);
// Rotation about the centre by `degrees`; out-of-range samples clamp to
// the nearest edge pixel.
Image Rotate(const Image& image, double degrees);
// Scales every value and clamps to [0, 1].
Image AdjustBrightness(const Image& image, double factor);

struct AugmentConfig {
  double flip_probability = 0.5;
  double max_rotation_deg = 15.0;
  double max_brightness_delta = 0.2;
};

struct AugmentParams {
  bool flip = false;
  double rotation_deg = 0.0;
  double brightness = 1.0;
};

AugmentParams SampleAugment(Rng& rng, const AugmentConfig& config = {});
Image ApplyAugment(const Image& image, const AugmentParams& params);

// `multiplicity` augmented variants of one image, deterministic in `seed`.
std::vector<Image> Augment(const Image& image, uint64_t seed, int multiplicity,
                           const AugmentConfig& config = {});

struct CropBox {
  int64_t x = 0;
  int64_t y = 0;
  int64_t width = 0;
  int64_t height = 0;
};

// Throws kContract when the box is empty or leaves the image.
Image Crop(const Image& image, const CropBox& box);

// Runs `command <image_path>` and parses "x y w h" from its standard output.
// Any failure (spawn, exit status, malformed output) is kDetector.
CropBox RunDetector(const std::string& command, const std::string& image_path);

}  // namespace biogate

#endif  // BIOGATE_IMAGE_H_
