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

#include "ccam/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "ccam/error.hpp"

namespace ccam {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'T', '1'};
constexpr std::size_t kHeaderFixed = 6;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t float_bits(double v) {
  return std::bit_cast<std::uint32_t>(static_cast<float>(v));
}

std::string hex64(std::uint64_t h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
    h >>= 4;
  }
  return out;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  if (t.dims.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw DimensionError("tensor rank exceeds 255");
  }
  if (t.values.size() != t.element_count()) {
    throw DimensionError("tensor holds " + std::to_string(t.values.size()) +
                         " values for " + std::to_string(t.element_count()) +
                         " elements");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderFixed + 4 * t.dims.size() + 4 * t.values.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kDtypeFloat32);
  out.push_back(static_cast<std::uint8_t>(t.dims.size()));
  for (std::size_t d : t.dims) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw DimensionError("tensor dimension exceeds uint32");
    }
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (double v : t.values) put_u32(out, float_bits(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes,
                     const std::string& source) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw BadMagicError(source + ": not a CCT1 tensor (bad magic)");
  }
  if (bytes.size() < kHeaderFixed) {
    throw TruncatedPayloadError(source + ": header is truncated");
  }
  if (bytes[4] != kDtypeFloat32) {
    throw UnsupportedDtypeError(source + ": unsupported dtype code " +
                                std::to_string(bytes[4]));
  }
  const std::size_t rank = bytes[5];
  if (bytes.size() < kHeaderFixed + 4 * rank) {
    throw TruncatedPayloadError(source + ": dimension table is truncated");
  }
  Tensor t;
  t.dims.reserve(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    t.dims.push_back(get_u32(bytes.data() + kHeaderFixed + 4 * i));
  }
  const std::size_t count = t.element_count();
  const std::size_t offset = kHeaderFixed + 4 * rank;
  const std::size_t available = bytes.size() - offset;
  if (available < 4 * count) {
    throw TruncatedPayloadError(source + ": payload holds " +
                                std::to_string(available) + " bytes, expected " +
                                std::to_string(4 * count));
  }
  if (available > 4 * count) {
    throw IoError(source + ": " + std::to_string(available - 4 * count) +
                  " trailing bytes after payload");
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = get_u32(bytes.data() + offset + 4 * i);
    t.values[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return t;
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  const std::vector<std::uint8_t> bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes, path.string());
}

Tensor tensor_from(const Matrix& m) {
  Tensor t;
  t.dims = {static_cast<std::size_t>(m.rows()),
            static_cast<std::size_t>(m.cols())};
  t.values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.values.push_back(m(i, j));
  return t;
}

Tensor tensor_from(const Vector& v) {
  Tensor t;
  t.dims = {static_cast<std::size_t>(v.size())};
  t.values.assign(v.data(), v.data() + v.size());
  return t;
}

Tensor scalar_tensor(double value) { return Tensor{{}, {value}}; }

Matrix to_matrix(const Tensor& t) {
  if (t.rank() != 2) {
    throw DimensionError("expected a rank-2 tensor, got rank " +
                         std::to_string(t.rank()));
  }
  Matrix m(static_cast<Eigen::Index>(t.dims[0]),
           static_cast<Eigen::Index>(t.dims[1]));
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = t.values[idx++];
  return m;
}

Vector to_vector(const Tensor& t) {
  if (t.rank() != 1) {
    throw DimensionError("expected a rank-1 tensor, got rank " +
                         std::to_string(t.rank()));
  }
  return Eigen::Map<const Vector>(t.values.data(),
                                  static_cast<Eigen::Index>(t.values.size()));
}

Matrix narrow(const Matrix& m) {
  return m.unaryExpr([](double v) { return narrow(v); });
}

Vector narrow(const Vector& v) {
  return v.unaryExpr([](double x) { return narrow(x); });
}

std::string checksum(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = kFnvOffset;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
  return hex64(h);
}

std::string checksum(std::span<const double> values) {
  std::uint64_t h = kFnvOffset;
  for (double v : values) {
    const std::uint32_t bits = float_bits(v);
    for (int i = 0; i < 4; ++i) {
      h ^= static_cast<std::uint8_t>(bits >> (8 * i));
      h *= kFnvPrime;
    }
  }
  return hex64(h);
}

std::string checksum(const Matrix& m) {
  return checksum(std::span<const double>(tensor_from(m).values));
}

}  // namespace ccam
