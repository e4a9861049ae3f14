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

#include "ccam/toy_cnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ccam/error.hpp"
#include "ccam/tensor_io.hpp"

namespace ccam {

namespace {

struct Shape {
  std::size_t height;
  std::size_t width;
  std::size_t channels;
  std::size_t size() const { return height * width * channels; }
};

std::string describe(const ToyLayer& layer, std::size_t index) {
  return "layer " + std::to_string(index) + " (" + layer.name + ")";
}

Shape output_shape(const ToyLayer& layer, const Shape& in, std::size_t index) {
  switch (layer.kind) {
    case LayerKind::kConv3x3: {
      const std::size_t cout = layer.bias.size();
      if (cout == 0 || layer.weights.size() != cout * in.channels * 9) {
        throw DimensionError(describe(layer, index) + ": conv3x3 expects " +
                             std::to_string(cout) + " x " +
                             std::to_string(in.channels) +
                             " x 3 x 3 weights, got " +
                             std::to_string(layer.weights.size()) + " values");
      }
      return {in.height, in.width, cout};
    }
    case LayerKind::kRelu:
      return in;
    case LayerKind::kMaxPool2x2:
      if (in.height < 2 || in.width < 2) {
        throw DimensionError(describe(layer, index) +
                             ": maxpool2x2 needs at least a 2x2 input");
      }
      return {in.height / 2, in.width / 2, in.channels};
    case LayerKind::kGlobalAvgPool:
      return {1, 1, in.channels};
    case LayerKind::kDense: {
      const std::size_t out = layer.bias.size();
      if (out == 0 || layer.weights.size() != out * in.size()) {
        throw DimensionError(describe(layer, index) + ": dense expects " +
                             std::to_string(out) + " x " +
                             std::to_string(in.size()) + " weights, got " +
                             std::to_string(layer.weights.size()) + " values");
      }
      return {1, 1, out};
    }
    case LayerKind::kSoftmax:
      return {1, 1, in.size()};
  }
  throw InvalidArgument("unknown layer kind");
}

LayerKind parse_kind(const std::string& type) {
  if (type == "conv3x3") return LayerKind::kConv3x3;
  if (type == "relu") return LayerKind::kRelu;
  if (type == "maxpool2x2") return LayerKind::kMaxPool2x2;
  if (type == "global_avg_pool") return LayerKind::kGlobalAvgPool;
  if (type == "dense") return LayerKind::kDense;
  if (type == "softmax") return LayerKind::kSoftmax;
  throw InvalidArgument("unknown layer type '" + type + "'");
}

Activation conv3x3(const ToyLayer& layer, const Activation& in) {
  const std::size_t cout = layer.bias.size();
  const std::size_t cin = in.channels;
  Activation out{in.height, in.width, cout,
                 std::vector<double>(in.height * in.width * cout)};
  const auto h = static_cast<long>(in.height);
  const auto w = static_cast<long>(in.width);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (std::size_t o = 0; o < cout; ++o) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cin; ++c) {
          for (long ky = 0; ky < 3; ++ky) {
            for (long kx = 0; kx < 3; ++kx) {
              const long sy = y + ky - 1;
              const long sx = x + kx - 1;
              if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
              const double weight =
                  layer.weights[((o * cin + c) * 3 + static_cast<std::size_t>(ky)) * 3 +
                                static_cast<std::size_t>(kx)];
              acc += weight * in.at(static_cast<std::size_t>(sy),
                                    static_cast<std::size_t>(sx), c);
            }
          }
        }
        out.values[(static_cast<std::size_t>(y) * in.width +
                    static_cast<std::size_t>(x)) * cout + o] = acc + layer.bias[o];
      }
    }
  }
  return out;
}

Activation maxpool2x2(const Activation& in) {
  Activation out{in.height / 2, in.width / 2, in.channels, {}};
  out.values.resize(out.height * out.width * out.channels);
  for (std::size_t y = 0; y < out.height; ++y)
    for (std::size_t x = 0; x < out.width; ++x)
      for (std::size_t c = 0; c < in.channels; ++c) {
        const double m = std::max(
            std::max(in.at(2 * y, 2 * x, c), in.at(2 * y, 2 * x + 1, c)),
            std::max(in.at(2 * y + 1, 2 * x, c), in.at(2 * y + 1, 2 * x + 1, c)));
        out.values[(y * out.width + x) * out.channels + c] = m;
      }
  return out;
}

Activation global_avg_pool(const Activation& in) {
  Activation out{1, 1, in.channels, std::vector<double>(in.channels, 0.0)};
  const double count = static_cast<double>(in.height * in.width);
  for (std::size_t c = 0; c < in.channels; ++c) {
    double sum = 0.0;
    for (std::size_t y = 0; y < in.height; ++y)
      for (std::size_t x = 0; x < in.width; ++x) sum += in.at(y, x, c);
    out.values[c] = sum / count;
  }
  return out;
}

Activation dense(const ToyLayer& layer, const Activation& in) {
  const std::size_t n_out = layer.bias.size();
  const std::size_t n_in = in.values.size();
  Activation out{1, 1, n_out, std::vector<double>(n_out)};
  for (std::size_t o = 0; o < n_out; ++o) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_in; ++i) {
      acc += layer.weights[o * n_in + i] * in.values[i];
    }
    out.values[o] = acc + layer.bias[o];
  }
  return out;
}

Activation softmax(const Activation& in) {
  Activation out{1, 1, in.values.size(), std::vector<double>(in.values.size())};
  const double peak = *std::max_element(in.values.begin(), in.values.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < in.values.size(); ++i) {
    out.values[i] = std::exp(in.values[i] - peak);
    sum += out.values[i];
  }
  for (double& v : out.values) v /= sum;
  return out;
}

std::vector<double> load_values(const std::filesystem::path& base,
                                const nlohmann::json& layer, const char* key,
                                std::size_t rank) {
  if (!layer.contains(key)) {
    throw IoError(std::string("toy model layer is missing '") + key + "'");
  }
  const Tensor t = load_tensor(base / layer.at(key).get<std::string>());
  if (t.rank() != rank) {
    throw DimensionError(std::string("toy model tensor '") + key + "' has rank " +
                         std::to_string(t.rank()) + ", expected " +
                         std::to_string(rank));
  }
  if (rank == 4 && (t.dims[2] != 3 || t.dims[3] != 3)) {
    throw DimensionError("conv3x3 weights must be Cout x Cin x 3 x 3");
  }
  return t.values;
}

}  // namespace

ToyCnnSpec::ToyCnnSpec(Extent input, std::vector<ToyLayer> layers)
    : input_(input), layers_(std::move(layers)) {
  if (input_.size() == 0) throw DimensionError("toy model input is empty");
  if (layers_.empty() || layers_.back().kind != LayerKind::kSoftmax) {
    throw InvalidArgument("toy model must end with a softmax layer");
  }
  Shape shape{input_.height, input_.width, 3};
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].kind == LayerKind::kSoftmax && i + 1 != layers_.size()) {
      throw InvalidArgument("softmax is only allowed as the final layer");
    }
    if (layers_[i].name.empty()) layers_[i].name = "layer" + std::to_string(i);
    shape = output_shape(layers_[i], shape, i);
  }
  num_classes_ = shape.size();
  if (num_classes_ < 2) {
    throw InvalidArgument("toy model softmax needs at least two classes");
  }
}

ToyCnnSpec ToyCnnSpec::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  const std::filesystem::path base = path.parent_path();
  try {
    const auto dims = doc.at("input").get<std::vector<std::size_t>>();
    if (dims.size() != 3 || dims[2] != 3) {
      throw DimensionError(path.string() + ": input must be [H, W, 3]");
    }
    std::vector<ToyLayer> layers;
    for (const auto& entry : doc.at("layers")) {
      ToyLayer layer;
      layer.name = entry.value("name", std::string());
      layer.kind = parse_kind(entry.at("type").get<std::string>());
      if (layer.kind == LayerKind::kConv3x3) {
        layer.weights = load_values(base, entry, "weights", 4);
        layer.bias = load_values(base, entry, "bias", 1);
      } else if (layer.kind == LayerKind::kDense) {
        layer.weights = load_values(base, entry, "weights", 2);
        layer.bias = load_values(base, entry, "bias", 1);
      }
      layers.push_back(std::move(layer));
    }
    return ToyCnnSpec({dims[0], dims[1]}, std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::size_t ToyCnnSpec::layer_index(const std::string& name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].name == name) return i;
  }
  throw InvalidArgument("toy model has no layer named '" + name + "'");
}

Activation to_activation(const Image& image) {
  return Activation{image.height(), image.width(), 3, image.values()};
}

Activation apply_layer(const ToyLayer& layer, const Activation& in) {
  switch (layer.kind) {
    case LayerKind::kConv3x3: return conv3x3(layer, in);
    case LayerKind::kRelu: {
      Activation out = in;
      for (double& v : out.values) v = std::max(v, 0.0);
      return out;
    }
    case LayerKind::kMaxPool2x2: return maxpool2x2(in);
    case LayerKind::kGlobalAvgPool: return global_avg_pool(in);
    case LayerKind::kDense: return dense(layer, in);
    case LayerKind::kSoftmax: return softmax(in);
  }
  throw InvalidArgument("unknown layer kind");
}

ForwardResult toy_forward(const ToyCnnSpec& spec, const Image& image,
                          std::optional<std::size_t> tap_layer) {
  if (image.extent() != spec.input()) {
    throw DimensionError("image is " + std::to_string(image.height()) + "x" +
                         std::to_string(image.width()) + ", model expects " +
                         std::to_string(spec.input().height) + "x" +
                         std::to_string(spec.input().width));
  }
  if (tap_layer && *tap_layer >= spec.layers().size()) {
    throw InvalidArgument("tap layer index out of range");
  }
  ForwardResult result;
  Activation act = to_activation(image);
  const auto& layers = spec.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i + 1 == layers.size()) {
      result.logits = Eigen::Map<const Vector>(
          act.values.data(), static_cast<Eigen::Index>(act.values.size()));
    }
    act = apply_layer(layers[i], act);
    if (tap_layer && *tap_layer == i) {
      Matrix fm(static_cast<Eigen::Index>(act.height * act.width),
                static_cast<Eigen::Index>(act.channels));
      for (std::size_t m = 0; m < act.height * act.width; ++m)
        for (std::size_t c = 0; c < act.channels; ++c)
          fm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) =
              act.values[m * act.channels + c];
      result.tap.emplace(std::move(fm), Extent{act.height, act.width});
    }
  }
  result.probabilities = Eigen::Map<const Vector>(
      act.values.data(), static_cast<Eigen::Index>(act.values.size()));
  return result;
}

}  // namespace ccam
