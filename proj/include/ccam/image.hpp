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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ccam/cam.hpp"
#include "ccam/tensor_io.hpp"

namespace ccam {

// H x W x 3 image, interleaved RGB, values in [0, 1].
class Image {
 public:
  Image(std::size_t height, std::size_t width, std::vector<double> rgb);
  static Image black(std::size_t height, std::size_t width);

  // Expects an H x W x 3 tensor with values in [0, 1].
  static Image from_tensor(const Tensor& t);
  Tensor to_tensor() const;

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  Extent extent() const { return {height_, width_}; }
  const std::vector<double>& values() const { return rgb_; }

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return rgb_[(y * width_ + x) * 3 + c];
  }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> rgb_;
};

// X o S: every color plane multiplied by the same saliency value.
Image apply_mask(const Image& image, const SaliencyMap& mask);

struct Rgb8Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> rgb;
};

// Per plane: round(255 * ((1 - s) p + s r)) with r = (1, 0, 0), rounding
// half away from zero.
Rgb8Image render_overlay(const Image& image, const SaliencyMap& s);

// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const Rgb8Image& image);
void write_ppm(const std::filesystem::path& path, const Rgb8Image& image);
Rgb8Image read_ppm(const std::filesystem::path& path);

// 8-bit image scaled to [0, 1].
Image to_unit_image(const Rgb8Image& image);

}  // namespace ccam
