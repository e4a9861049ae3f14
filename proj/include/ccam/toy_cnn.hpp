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

// Minimal CNN forward evaluator. Activations are kept channel-last (HWC) so
// that a spatial activation reshapes directly into an M x K feature map.
//
// JSON form (tensor paths relative to the JSON file):
//
//   {
//     "format": "ccam-toy-cnn/1",
//     "input": [H, W, 3],
//     "layers": [
//       {"name": "conv1", "type": "conv3x3", "weights": "conv1_w.cct",
//        "bias": "conv1_b.cct"},                     // weights Cout x Cin x 3 x 3
//       {"name": "relu1", "type": "relu"},
//       {"name": "pool1", "type": "maxpool2x2"},
//       {"name": "gap", "type": "global_avg_pool"},
//       {"name": "fc", "type": "dense", "weights": "fc_w.cct",
//        "bias": "fc_b.cct"},                        // weights Out x In
//       {"name": "prob", "type": "softmax"}
//     ]
//   }

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccam/cam.hpp"
#include "ccam/image.hpp"
#include "ccam/linalg.hpp"

namespace ccam {

struct Activation {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;  // HWC

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return values[(y * width + x) * channels + c];
  }
};

enum class LayerKind {
  kConv3x3,
  kRelu,
  kMaxPool2x2,
  kGlobalAvgPool,
  kDense,
  kSoftmax,
};

struct ToyLayer {
  std::string name;
  LayerKind kind = LayerKind::kRelu;
  // conv3x3: Cout x Cin x 3 x 3 flattened; dense: Out x In flattened.
  std::vector<double> weights;
  std::vector<double> bias;
};

class ToyCnnSpec {
 public:
  // Validates that shapes compose and the last layer is a softmax over at
  // least two classes. Throws DimensionError / InvalidArgument otherwise.
  ToyCnnSpec(Extent input, std::vector<ToyLayer> layers);

  static ToyCnnSpec load_json(const std::filesystem::path& path);

  Extent input() const { return input_; }
  const std::vector<ToyLayer>& layers() const { return layers_; }
  std::size_t num_classes() const { return num_classes_; }

  // Index of the named layer; throws InvalidArgument when absent.
  std::size_t layer_index(const std::string& name) const;

 private:
  Extent input_;
  std::vector<ToyLayer> layers_;
  std::size_t num_classes_ = 0;
};

struct ForwardResult {
  Vector probabilities;
  Vector logits;  // input to the final softmax
  std::optional<FeatureMap> tap;
};

// Deterministic forward pass; when `tap_layer` is given, also returns that
// layer's output as a feature map (the layer must produce a spatial map).
ForwardResult toy_forward(const ToyCnnSpec& spec, const Image& image,
                          std::optional<std::size_t> tap_layer = std::nullopt);

// Single layer application, exposed for tests.
Activation apply_layer(const ToyLayer& layer, const Activation& in);

Activation to_activation(const Image& image);

}  // namespace ccam
