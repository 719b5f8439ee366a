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


#include "biogate/image.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "biogate/error.h"
#include "biogate/wav.h"

namespace biogate {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  int64_t Number() {
    SkipSpaceAndComments();
    Require(pos_ < bytes_.size() && std::isdigit(bytes_[pos_]), ErrorCode::kFormat,
            "netpbm header is missing a number");
    int64_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      Require(value <= (int64_t{1} << 31), ErrorCode::kFormat,
              "netpbm header number is too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  size_t RasterStart() {
    Require(pos_ < bytes_.size() && std::isspace(bytes_[pos_]), ErrorCode::kFormat,
            "netpbm header is not terminated by whitespace");
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 2;
};

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Bilinear sample at continuous pixel coordinates with edge clamping.
double Sample(const Image& img, double y, double x, int64_t c) {
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  const auto y0 = static_cast<int64_t>(std::floor(y));
  const auto x0 = static_cast<int64_t>(std::floor(x));
  const int64_t y1 = std::min(y0 + 1, img.height - 1);
  const int64_t x1 = std::min(x0 + 1, img.width - 1);
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);
  const double top = img.at(y0, x0, c) * (1 - fx) + img.at(y0, x1, c) * fx;
  const double bottom = img.at(y1, x0, c) * (1 - fx) + img.at(y1, x1, c) * fx;
  return top * (1 - fy) + bottom * fy;
}

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

}  // namespace

Image Image::Blank(int64_t height, int64_t width, int64_t channels, double value) {
  Image img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.pixels.assign(static_cast<size_t>(height * width * channels), value);
  return img;
}

Tensor Image::ToTensor() const {
  std::vector<double> chw(pixels.size());
  for (int64_t c = 0; c < channels; ++c) {
    for (int64_t y = 0; y < height; ++y) {
      for (int64_t x = 0; x < width; ++x) {
        chw[(c * height + y) * width + x] = at(y, x, c);
      }
    }
  }
  return Tensor::FromVector({channels, height, width}, std::move(chw));
}

Image ParseNetpbm(std::span<const uint8_t> bytes) {
  Require(bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'),
          ErrorCode::kFormat, "not a binary PGM/PPM file");
  HeaderReader header(bytes);
  Image img;
  img.channels = bytes[1] == '6' ? 3 : 1;
  img.width = header.Number();
  img.height = header.Number();
  const int64_t maxval = header.Number();
  Require(img.width > 0 && img.height > 0, ErrorCode::kFormat,
          "netpbm image has zero extent");
  Require(maxval >= 1 && maxval <= 65535, ErrorCode::kFormat,
          "netpbm maxval out of range");
  const size_t start = header.RasterStart();
  const int64_t sample_bytes = maxval > 255 ? 2 : 1;
  const int64_t count = img.width * img.height * img.channels;
  Require(bytes.size() - start >= static_cast<size_t>(count * sample_bytes),
          ErrorCode::kFormat, "netpbm raster is truncated");
  img.pixels.resize(static_cast<size_t>(count));
  const double scale = 1.0 / static_cast<double>(maxval);
  for (int64_t i = 0; i < count; ++i) {
    uint32_t v;
    if (sample_bytes == 1) {
      v = bytes[start + i];
    } else {
      v = (uint32_t{bytes[start + 2 * i]} << 8) | bytes[start + 2 * i + 1];
    }
    img.pixels[i] = Clamp01(v * scale);
  }
  return img;
}

std::vector<uint8_t> EncodeNetpbm(const Image& image) {
  Require(image.channels == 1 || image.channels == 3, ErrorCode::kUnsupported,
          "netpbm output needs 1 or 3 channels");
  const std::string header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.pixels.size());
  for (double v : image.pixels) {
    out.push_back(static_cast<uint8_t>(std::lround(Clamp01(v) * 255.0)));
  }
  return out;
}

Image ReadImageFile(const std::string& path) {
  Image img = ParseNetpbm(ReadFileBytes(path));
  img.source_id = path;
  return img;
}

void WriteImageFile(const std::string& path, const Image& image) {
  WriteFileBytes(path, EncodeNetpbm(image));
}

Image ToRgb(const Image& image) {
  if (image.channels == 3) return image;
  Require(image.channels == 1, ErrorCode::kUnsupported,
          "images must have 1 or 3 channels");
  Image out = Image::Blank(image.height, image.width, 3);
  out.source_id = image.source_id;
  for (int64_t i = 0; i < image.height * image.width; ++i) {
    for (int64_t c = 0; c < 3; ++c) out.pixels[i * 3 + c] = image.pixels[i];
  }
  return out;
}

Image Resize(const Image& image, int64_t height, int64_t width) {
  Require(image.height >= 1 && image.width >= 1 && height >= 1 && width >= 1,
          ErrorCode::kShape, "resize needs positive extents");
  Image out = Image::Blank(height, width, image.channels);
  out.source_id = image.source_id;
  const double sy = static_cast<double>(image.height) / static_cast<double>(height);
  const double sx = static_cast<double>(image.width) / static_cast<double>(width);
  for (int64_t y = 0; y < height; ++y) {
    const double src_y = (static_cast<double>(y) + 0.5) * sy - 0.5;
    for (int64_t x = 0; x < width; ++x) {
      const double src_x = (static_cast<double>(x) + 0.5) * sx - 0.5;
      for (int64_t c = 0; c < image.channels; ++c) {
        out.at(y, x, c) = Clamp01(Sample(image, src_y, src_x, c));
      }
    }
  }
  return out;
}

Image FlipHorizontal(const Image& image) {
  Image out = image;
  for (int64_t y = 0; y < image.height; ++y) {
    for (int64_t x = 0; x < image.width; ++x) {
      for (int64_t c = 0; c < image.channels; ++c) {
        out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
      }
    }
  }
  return out;
}

Image Rotate(const Image& image, double degrees) {
  if (degrees == 0.0) return image;
  Image out = image;
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta), sin_t = std::sin(theta);
  const double cy = (static_cast<double>(image.height) - 1) / 2;
  const double cx = (static_cast<double>(image.width) - 1) / 2;
  for (int64_t y = 0; y < image.height; ++y) {
    for (int64_t x = 0; x < image.width; ++x) {
      // Inverse map: rotate the destination point clockwise into the source.
      const double dx = static_cast<double>(x) - cx;
      const double dy = static_cast<double>(y) - cy;
      const double src_x = cx + cos_t * dx - sin_t * dy;
      const double src_y = cy + sin_t * dx + cos_t * dy;
      for (int64_t c = 0; c < image.channels; ++c) {
        out.at(y, x, c) = Clamp01(Sample(image, src_y, src_x, c));
      }
    }
  }
  return out;
}

Image AdjustBrightness(const Image& image, double factor) {
  Image out = image;
  for (double& v : out.pixels) v = Clamp01(v * factor);
  return out;
}

AugmentParams SampleAugment(Rng& rng, const AugmentConfig& config) {
  AugmentParams p;
  p.flip = rng.Uniform() < config.flip_probability;
  p.rotation_deg = rng.Uniform(-config.max_rotation_deg, config.max_rotation_deg);
  p.brightness = rng.Uniform(1.0 - config.max_brightness_delta,
                             1.0 + config.max_brightness_delta);
  return p;
}

Image ApplyAugment(const Image& image, const AugmentParams& params) {
  Image out = params.flip ? FlipHorizontal(image) : image;
  out = Rotate(out, params.rotation_deg);
  if (params.brightness != 1.0) out = AdjustBrightness(out, params.brightness);
  return out;
}

std::vector<Image> Augment(const Image& image, uint64_t seed, int multiplicity,
                           const AugmentConfig& config) {
  Require(multiplicity >= 0, ErrorCode::kContract, "negative augmentation multiplicity");
  Rng rng(seed);
  std::vector<Image> out;
  out.reserve(static_cast<size_t>(multiplicity));
  for (int i = 0; i < multiplicity; ++i) {
    out.push_back(ApplyAugment(image, SampleAugment(rng, config)));
  }
  return out;
}

Image Crop(const Image& image, const CropBox& box) {
  Require(box.width > 0 && box.height > 0 && box.x >= 0 && box.y >= 0 &&
              box.x + box.width <= image.width && box.y + box.height <= image.height,
          ErrorCode::kContract, "crop box lies outside the image");
  Image out = Image::Blank(box.height, box.width, image.channels);
  out.source_id = image.source_id;
  for (int64_t y = 0; y < box.height; ++y) {
    for (int64_t x = 0; x < box.width; ++x) {
      for (int64_t c = 0; c < image.channels; ++c) {
        out.at(y, x, c) = image.at(box.y + y, box.x + x, c);
      }
    }
  }
  return out;
}

CropBox RunDetector(const std::string& command, const std::string& image_path) {
  const std::string full = command + " " + ShellQuote(image_path);
  FILE* pipe = popen(full.c_str(), "r");
  Require(pipe != nullptr, ErrorCode::kDetector, "cannot start detector: " + command);
  std::string output;
  std::array<char, 256> buf;
  size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  const int status = pclose(pipe);
  Require(status == 0, ErrorCode::kDetector,
          "detector exited with status " + std::to_string(status));
  std::istringstream in(output);
  CropBox box;
  Require(static_cast<bool>(in >> box.x >> box.y >> box.width >> box.height),
          ErrorCode::kDetector, "detector output is not four integers: " + output);
  std::string extra;
  Require(!(in >> extra), ErrorCode::kDetector,
          "detector printed more than four values: " + output);
  Require(box.width > 0 && box.height > 0, ErrorCode::kDetector,
          "detector returned an empty box");
  return box;
}

}  // namespace biogate
