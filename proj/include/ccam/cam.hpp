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
#include <optional>
#include <string>
#include <string_view>

#include "ccam/conceptor.hpp"
#include "ccam/linalg.hpp"

namespace ccam {

class ModelBackend;

struct Extent {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  bool operator==(const Extent&) const = default;
};

// Activations of one layer as an M x K matrix: row y*w + x holds the K
// channel values at spatial position (y, x).
class FeatureMap {
 public:
  FeatureMap(Matrix values, Extent spatial);

  const Matrix& matrix() const { return values_; }
  Extent spatial() const { return spatial_; }
  std::size_t positions() const { return spatial_.size(); }
  std::size_t channels() const {
    return static_cast<std::size_t>(values_.cols());
  }

  // Channel k as an h x w grid.
  Matrix channel_grid(std::size_t k) const;

 private:
  Matrix values_;
  Extent spatial_;
};

enum class WeightScheme { kScore, kGrad, kCam, kIngested };

std::string_view to_string(WeightScheme scheme);
std::optional<WeightScheme> parse_weight_scheme(std::string_view text);

struct ChannelWeights {
  Vector values;
  WeightScheme scheme = WeightScheme::kIngested;
};

// An H x W grid with every value in [0, 1].
class SaliencyMap {
 public:
  explicit SaliencyMap(Matrix grid);

  const Matrix& grid() const { return grid_; }
  Extent extent() const {
    return {static_cast<std::size_t>(grid_.rows()),
            static_cast<std::size_t>(grid_.cols())};
  }
  bool is_zero() const { return grid_.isZero(0.0); }

 private:
  Matrix grid_;
};

enum class SaliencyMode { kBaseline, kPositive, kComplementary, kComprehensive };

std::string_view to_string(SaliencyMode mode);
std::optional<SaliencyMode> parse_saliency_mode(std::string_view text);

FeatureMap tanh_normalize(const FeatureMap& f);

// ReLU, corner-aligned bilinear upsampling to `target`, then min-max
// normalization. A map that is constant after upsampling yields all zeros.
// The target must be at least as large as the grid in both directions.
SaliencyMap rescale_psi(const Matrix& grid, Extent target);

// w_k = masked_score(k)[c] - base_score[c].
ChannelWeights scorecam_weights(const FeatureMap& f,
                                const ModelBackend& backend,
                                std::size_t class_index);

// (1 / (K M)) G^T 1 for an M x K gradient of the class score with respect to
// the feature map.
ChannelWeights gradcam_weights(const Matrix& gradients, const FeatureMap& f);

// (1 / (N1 N2)) W^T 1 for the N2 x N1 connection weights between the last
// convolutional layer and the first dense layer. N1 must equal K.
ChannelWeights cam_weights(const Matrix& fc_weights, std::size_t channels);

// Min-max normalization to [0, 1]; a constant vector maps to 0.5.
Vector normalize_weights(const Vector& w);

// F diag(w) (or F diag(1 - w) when reversed) with w normalized first.
EvidenceMatrix build_evidence(const FeatureMap& f, const ChannelWeights& w,
                              bool reversed);

// Psi(F w) using the raw weights.
SaliencyMap baseline_saliency(const FeatureMap& f, const ChannelWeights& w,
                              Extent target);

// Psi(C Z 1).
SaliencyMap synchronized_saliency(const Matrix& c, const EvidenceMatrix& z,
                                  Extent target);
SaliencyMap synchronized_saliency(const Conceptor& c, const EvidenceMatrix& z,
                                  Extent target);

// Every intermediate of the comprehensive pipeline.
struct ConceptorCamResult {
  Vector normalized_weights;
  EvidenceMatrix evidence;
  EvidenceMatrix reversed_evidence;
  Conceptor positive;        // C, learned from Z
  Conceptor reversed;        // Cbar, learned from Zbar
  Conceptor complementary;   // C* = NOT Cbar
  Matrix fusion;             // (C + C*) / 2
  SaliencyMap positive_map;
  SaliencyMap complementary_map;
  SaliencyMap comprehensive_map;
};

ConceptorCamResult conceptor_cam(const FeatureMap& f, const ChannelWeights& w,
                                 double alpha, Extent target);

SaliencyMap comprehensive_saliency(const FeatureMap& f,
                                   const ChannelWeights& w, double alpha,
                                   Extent target);

// Dispatches on mode; `baseline` ignores alpha.
SaliencyMap compute_saliency(SaliencyMode mode, const FeatureMap& f,
                             const ChannelWeights& w, double alpha,
                             Extent target);

}  // namespace ccam
