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

#include "ccam/cam.hpp"

#include <algorithm>
#include <cmath>

#include "ccam/backend.hpp"
#include "ccam/error.hpp"

namespace ccam {

namespace {

Matrix to_grid(const Vector& column, Extent spatial) {
  Matrix grid(static_cast<Eigen::Index>(spatial.height),
              static_cast<Eigen::Index>(spatial.width));
  for (std::size_t y = 0; y < spatial.height; ++y)
    for (std::size_t x = 0; x < spatial.width; ++x)
      grid(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) =
          column(static_cast<Eigen::Index>(y * spatial.width + x));
  return grid;
}

// Source coordinate of output index i when n samples are stretched to
// `out` samples with both end points aligned.
double corner_aligned(std::size_t i, std::size_t n, std::size_t out) {
  if (n == 1 || out == 1) return 0.0;
  return static_cast<double>(i) * static_cast<double>(n - 1) /
         static_cast<double>(out - 1);
}

void require_weights(const FeatureMap& f, const ChannelWeights& w) {
  if (static_cast<std::size_t>(w.values.size()) != f.channels()) {
    throw DimensionError("weights have length " +
                         std::to_string(w.values.size()) + ", feature map has " +
                         std::to_string(f.channels()) + " channels");
  }
}

}  // namespace

FeatureMap::FeatureMap(Matrix values, Extent spatial)
    : values_(std::move(values)), spatial_(spatial) {
  if (values_.cols() < 1) {
    throw DimensionError("feature map needs at least one channel");
  }
  if (spatial_.size() != static_cast<std::size_t>(values_.rows()) ||
      spatial_.size() == 0) {
    throw DimensionError("feature map: " + std::to_string(spatial_.height) +
                         "x" + std::to_string(spatial_.width) +
                         " grid does not match " +
                         std::to_string(values_.rows()) + " rows");
  }
}

Matrix FeatureMap::channel_grid(std::size_t k) const {
  if (k >= channels()) {
    throw InvalidArgument("channel index " + std::to_string(k) +
                          " out of range");
  }
  return to_grid(values_.col(static_cast<Eigen::Index>(k)), spatial_);
}

std::string_view to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kScore: return "score";
    case WeightScheme::kGrad: return "grad";
    case WeightScheme::kCam: return "cam";
    case WeightScheme::kIngested: return "ingested";
  }
  return "unknown";
}

std::optional<WeightScheme> parse_weight_scheme(std::string_view text) {
  if (text == "score") return WeightScheme::kScore;
  if (text == "grad") return WeightScheme::kGrad;
  if (text == "cam") return WeightScheme::kCam;
  if (text == "ingested") return WeightScheme::kIngested;
  return std::nullopt;
}

SaliencyMap::SaliencyMap(Matrix grid) : grid_(std::move(grid)) {
  if (grid_.size() == 0) throw DimensionError("saliency map is empty");
  if (!grid_.allFinite() || grid_.minCoeff() < 0.0 || grid_.maxCoeff() > 1.0) {
    throw InvalidArgument("saliency values must lie in [0, 1]");
  }
}

std::string_view to_string(SaliencyMode mode) {
  switch (mode) {
    case SaliencyMode::kBaseline: return "baseline";
    case SaliencyMode::kPositive: return "positive";
    case SaliencyMode::kComplementary: return "complementary";
    case SaliencyMode::kComprehensive: return "comprehensive";
  }
  return "unknown";
}

std::optional<SaliencyMode> parse_saliency_mode(std::string_view text) {
  if (text == "baseline") return SaliencyMode::kBaseline;
  if (text == "positive") return SaliencyMode::kPositive;
  if (text == "complementary") return SaliencyMode::kComplementary;
  if (text == "comprehensive") return SaliencyMode::kComprehensive;
  return std::nullopt;
}

FeatureMap tanh_normalize(const FeatureMap& f) {
  Matrix out = f.matrix().unaryExpr([](double v) { return std::tanh(v); });
  return FeatureMap(std::move(out), f.spatial());
}

SaliencyMap rescale_psi(const Matrix& grid, Extent target) {
  const auto h = static_cast<std::size_t>(grid.rows());
  const auto w = static_cast<std::size_t>(grid.cols());
  if (h == 0 || w == 0) throw DimensionError("rescale: empty grid");
  if (target.height < h || target.width < w) {
    throw InvalidArgument("rescale: target " + std::to_string(target.height) +
                          "x" + std::to_string(target.width) +
                          " is smaller than the " + std::to_string(h) + "x" +
                          std::to_string(w) + " grid");
  }
  const Matrix relu = grid.cwiseMax(0.0);
  Matrix up(static_cast<Eigen::Index>(target.height),
            static_cast<Eigen::Index>(target.width));
  for (std::size_t i = 0; i < target.height; ++i) {
    const double sy = corner_aligned(i, h, target.height);
    const auto y0 = std::min(static_cast<std::size_t>(sy), h - 1);
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t j = 0; j < target.width; ++j) {
      const double sx = corner_aligned(j, w, target.width);
      const auto x0 = std::min(static_cast<std::size_t>(sx), w - 1);
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - static_cast<double>(x0);
      const auto at = [&](std::size_t y, std::size_t x) {
        return relu(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      };
      const double top = (1.0 - fx) * at(y0, x0) + fx * at(y0, x1);
      const double bottom = (1.0 - fx) * at(y1, x0) + fx * at(y1, x1);
      up(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (1.0 - fy) * top + fy * bottom;
    }
  }
  const double lo = up.minCoeff();
  const double hi = up.maxCoeff();
  if (!(hi > lo)) {
    return SaliencyMap(Matrix::Zero(up.rows(), up.cols()));
  }
  const double span = hi - lo;
  up = up.unaryExpr([&](double v) { return std::clamp((v - lo) / span, 0.0, 1.0); });
  return SaliencyMap(std::move(up));
}

ChannelWeights scorecam_weights(const FeatureMap& f,
                                const ModelBackend& backend,
                                std::size_t class_index) {
  if (backend.num_channels() != f.channels()) {
    throw DimensionError("backend answers for " +
                         std::to_string(backend.num_channels()) +
                         " channels, feature map has " +
                         std::to_string(f.channels()));
  }
  const Vector base = backend.base_scores();
  if (class_index >= static_cast<std::size_t>(base.size())) {
    throw InvalidArgument("class index " + std::to_string(class_index) +
                          " out of range for " + std::to_string(base.size()) +
                          " classes");
  }
  const auto c = static_cast<Eigen::Index>(class_index);
  Vector w(static_cast<Eigen::Index>(f.channels()));
  for (std::size_t k = 0; k < f.channels(); ++k) {
    const Vector masked = backend.masked_scores(k);
    if (masked.size() != base.size()) {
      throw CapabilityError("masked score row " + std::to_string(k) +
                            " has the wrong number of classes");
    }
    w(static_cast<Eigen::Index>(k)) = masked(c) - base(c);
  }
  return {std::move(w), WeightScheme::kScore};
}

ChannelWeights gradcam_weights(const Matrix& gradients, const FeatureMap& f) {
  if (static_cast<std::size_t>(gradients.rows()) != f.positions() ||
      static_cast<std::size_t>(gradients.cols()) != f.channels()) {
    throw DimensionError("gradients are " + std::to_string(gradients.rows()) +
                         "x" + std::to_string(gradients.cols()) +
                         ", feature map is " + std::to_string(f.positions()) +
                         "x" + std::to_string(f.channels()));
  }
  const double scale =
      1.0 / static_cast<double>(gradients.rows() * gradients.cols());
  Vector w = gradients.colwise().sum().transpose() * scale;
  return {std::move(w), WeightScheme::kGrad};
}

ChannelWeights cam_weights(const Matrix& fc_weights, std::size_t channels) {
  if (fc_weights.size() == 0 ||
      static_cast<std::size_t>(fc_weights.cols()) != channels) {
    throw DimensionError("connection weights have " +
                         std::to_string(fc_weights.cols()) +
                         " columns, expected " + std::to_string(channels));
  }
  const double scale =
      1.0 / static_cast<double>(fc_weights.rows() * fc_weights.cols());
  Vector w = fc_weights.colwise().sum().transpose() * scale;
  return {std::move(w), WeightScheme::kCam};
}

Vector normalize_weights(const Vector& w) {
  if (w.size() == 0) throw DimensionError("empty weight vector");
  if (!w.allFinite()) throw InvalidArgument("weights must be finite");
  const double lo = w.minCoeff();
  const double hi = w.maxCoeff();
  if (!(hi > lo)) return Vector::Constant(w.size(), 0.5);
  return (w.array() - lo) / (hi - lo);
}

EvidenceMatrix build_evidence(const FeatureMap& f, const ChannelWeights& w,
                              bool reversed) {
  require_weights(f, w);
  Vector scale = normalize_weights(w.values);
  if (reversed) scale = (1.0 - scale.array()).matrix();
  Matrix z = f.matrix() * scale.asDiagonal();
  return EvidenceMatrix(std::move(z), f.spatial().height, f.spatial().width);
}

SaliencyMap baseline_saliency(const FeatureMap& f, const ChannelWeights& w,
                              Extent target) {
  require_weights(f, w);
  const Vector fused = f.matrix() * w.values;
  return rescale_psi(to_grid(fused, f.spatial()), target);
}

SaliencyMap synchronized_saliency(const Matrix& c, const EvidenceMatrix& z,
                                  Extent target) {
  if (c.rows() != c.cols() || static_cast<std::size_t>(c.cols()) != z.rows()) {
    throw DimensionError("synchronization matrix is " +
                         std::to_string(c.rows()) + "x" +
                         std::to_string(c.cols()) + ", evidence has " +
                         std::to_string(z.rows()) + " rows");
  }
  const Vector fused = c * z.matrix().rowwise().sum();
  return rescale_psi(to_grid(fused, {z.height(), z.width()}), target);
}

SaliencyMap synchronized_saliency(const Conceptor& c, const EvidenceMatrix& z,
                                  Extent target) {
  return synchronized_saliency(c.matrix(), z, target);
}

ConceptorCamResult conceptor_cam(const FeatureMap& f, const ChannelWeights& w,
                                 double alpha, Extent target) {
  require_weights(f, w);
  EvidenceMatrix z = build_evidence(f, w, false);
  EvidenceMatrix zbar = build_evidence(f, w, true);
  Conceptor c = learn_conceptor(z, alpha);
  Conceptor cbar = learn_conceptor(zbar, alpha);
  Conceptor cstar = negate(cbar);
  Matrix fusion = 0.5 * (c.matrix() + cstar.matrix());
  SaliencyMap positive_map = synchronized_saliency(c, z, target);
  SaliencyMap complementary_map = synchronized_saliency(cstar, z, target);
  SaliencyMap comprehensive_map = synchronized_saliency(fusion, z, target);
  return ConceptorCamResult{
      .normalized_weights = normalize_weights(w.values),
      .evidence = std::move(z),
      .reversed_evidence = std::move(zbar),
      .positive = std::move(c),
      .reversed = std::move(cbar),
      .complementary = std::move(cstar),
      .fusion = std::move(fusion),
      .positive_map = std::move(positive_map),
      .complementary_map = std::move(complementary_map),
      .comprehensive_map = std::move(comprehensive_map),
  };
}

SaliencyMap comprehensive_saliency(const FeatureMap& f,
                                   const ChannelWeights& w, double alpha,
                                   Extent target) {
  return conceptor_cam(f, w, alpha, target).comprehensive_map;
}

SaliencyMap compute_saliency(SaliencyMode mode, const FeatureMap& f,
                             const ChannelWeights& w, double alpha,
                             Extent target) {
  switch (mode) {
    case SaliencyMode::kBaseline:
      return baseline_saliency(f, w, target);
    case SaliencyMode::kPositive: {
      const EvidenceMatrix z = build_evidence(f, w, false);
      return synchronized_saliency(learn_conceptor(z, alpha), z, target);
    }
    case SaliencyMode::kComplementary: {
      const EvidenceMatrix z = build_evidence(f, w, false);
      const EvidenceMatrix zbar = build_evidence(f, w, true);
      return synchronized_saliency(negate(learn_conceptor(zbar, alpha)), z,
                                   target);
    }
    case SaliencyMode::kComprehensive:
      return comprehensive_saliency(f, w, alpha, target);
  }
  throw InvalidArgument("unknown saliency mode");
}

}  // namespace ccam
