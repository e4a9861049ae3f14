/*
 * Copyright 2026 The ccam Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ccam/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "ccam/error.hpp"

namespace ccam {

Image::Image(std::size_t height, std::size_t width, std::vector<double> rgb)
    : height_(height), width_(width), rgb_(std::move(rgb)) {
  if (height_ == 0 || width_ == 0) throw DimensionError("image is empty");
  if (rgb_.size() != height_ * width_ * 3) {
    throw DimensionError("image buffer holds " + std::to_string(rgb_.size()) +
                         " values, expected " +
                         std::to_string(height_ * width_ * 3));
  }
  for (double v : rgb_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("image values must lie in [0, 1]");
    }
  }
}

Image Image::black(std::size_t height, std::size_t width) {
  return Image(height, width, std::vector<double>(height * width * 3, 0.0));
}

Image Image::from_tensor(const Tensor& t) {
  if (t.rank() != 3 || t.dims[2] != 3) {
    throw DimensionError("input image must be an H x W x 3 tensor");
  }
  return Image(t.dims[0], t.dims[1], t.values);
}

Tensor Image::to_tensor() const { return Tensor{{height_, width_, 3}, rgb_}; }

Image apply_mask(const Image& image, const SaliencyMap& mask) {
  if (mask.extent() != image.extent()) {
    throw DimensionError("mask and image sizes differ");
  }
  std::vector<double> out(image.values().size());
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      const double s = mask.grid()(static_cast<Eigen::Index>(y),
                                   static_cast<Eigen::Index>(x));
      for (std::size_t c = 0; c < 3; ++c) {
        out[(y * image.width() + x) * 3 + c] = image.at(y, x, c) * s;
      }
    }
  }
  return Image(image.height(), image.width(), std::move(out));
}

Rgb8Image render_overlay(const Image& image, const SaliencyMap& s) {
  if (s.extent() != image.extent()) {
    throw DimensionError("overlay: saliency and image sizes differ");
  }
  static constexpr double kRed[3] = {1.0, 0.0, 0.0};
  Rgb8Image out{image.height(), image.width(),
                std::vector<std::uint8_t>(image.values().size())};
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      const double a = s.grid()(static_cast<Eigen::Index>(y),
                                static_cast<Eigen::Index>(x));
      for (std::size_t c = 0; c < 3; ++c) {
        const double blended = (1.0 - a) * image.at(y, x, c) + a * kRed[c];
        // std::round rounds halfway cases away from zero.
        const double q = std::round(255.0 * blended);
        out.rgb[(y * image.width() + x) * 3 + c] =
            static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_ppm(const Rgb8Image& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

void write_ppm(const std::filesystem::path& path, const Rgb8Image& image) {
  const std::vector<std::uint8_t> bytes = encode_ppm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Rgb8Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6") throw IoError(path.string() + ": not a binary PPM");
  std::size_t fields[3];
  for (std::size_t& f : fields) {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    if (!(in >> f)) throw IoError(path.string() + ": malformed PPM header");
  }
  if (fields[2] != 255) throw IoError(path.string() + ": only maxval 255 is supported");
  in.get();
  Rgb8Image img{fields[1], fields[0],
                std::vector<std::uint8_t>(fields[0] * fields[1] * 3)};
  in.read(reinterpret_cast<char*>(img.rgb.data()),
          static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) {
    throw IoError(path.string() + ": truncated PPM payload");
  }
  return img;
}

Image to_unit_image(const Rgb8Image& image) {
  std::vector<double> values(image.rgb.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = image.rgb[i] / 255.0;
  return Image(image.height, image.width, std::move(values));
}

}  // namespace ccam
