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

// CCT1 tensor interchange format.
//
//   offset  size       field
//   0       4          magic "CCT1"
//   4       1          dtype code (1 = float32, little-endian)
//   5       1          rank
//   6       4 * rank   dims, uint32 little-endian
//   ...     4 * prod   payload, row-major
//
// Values are held as double in memory, narrowed to float32 on save and
// widened on load. A rank-0 tensor holds a single scalar.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ccam/linalg.hpp"

namespace ccam {

struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<double> values;

  std::size_t rank() const { return dims.size(); }
  std::size_t element_count() const;
};

inline constexpr std::uint8_t kDtypeFloat32 = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);

// `source` names the origin in error messages.
Tensor decode_tensor(std::span<const std::uint8_t> bytes,
                     const std::string& source = "<memory>");

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

Tensor tensor_from(const Matrix& m);
Tensor tensor_from(const Vector& v);
Tensor scalar_tensor(double value);

// Rank-2 tensor as a matrix. Throws DimensionError for other ranks.
Matrix to_matrix(const Tensor& t);
// Rank-1 tensor as a vector. Throws DimensionError for other ranks.
Vector to_vector(const Tensor& t);

// Round-trips a value through float32.
inline double narrow(double v) {
  return static_cast<double>(static_cast<float>(v));
}
Matrix narrow(const Matrix& m);
Vector narrow(const Vector& v);

// FNV-1a 64 over the float32 little-endian encoding of the values, as hex.
std::string checksum(std::span<const double> values);
std::string checksum(const Matrix& m);
std::string checksum(std::span<const std::uint8_t> bytes);

}  // namespace ccam
