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

#include "ccam/explain.hpp"

#include <cmath>

#include "ccam/error.hpp"

namespace ccam {

bool resolve_tanh(const ExplainOptions& options) {
  if (options.tanh) return *options.tanh;
  return options.scheme == WeightScheme::kGrad ||
         options.scheme == WeightScheme::kCam;
}

Explanation explain(const EvidenceRecord& record, const ModelBackend& backend,
                    const ExplainOptions& options) {
  if (!(options.alpha >= 0.0 && options.alpha <= kMaxAperture)) {
    throw InvalidArgument("aperture must lie in [0, 100]");
  }
  if (options.score_space != record.score_space) {
    throw InvalidArgument("record carries " +
                          std::string(to_string(record.score_space)) +
                          " scores, " + std::string(to_string(options.score_space)) +
                          " requested");
  }
  FeatureMap features =
      resolve_tanh(options) ? tanh_normalize(record.features) : record.features;

  ChannelWeights weights;
  switch (options.scheme) {
    case WeightScheme::kScore:
      weights = scorecam_weights(features, backend, record.class_index);
      break;
    case WeightScheme::kGrad:
      if (!record.gradients) throw CapabilityError("record carries no gradients");
      weights = gradcam_weights(*record.gradients, features);
      break;
    case WeightScheme::kCam:
      if (!record.fc_weights) throw CapabilityError("record carries no fc_weights");
      weights = cam_weights(*record.fc_weights, features.channels());
      break;
    case WeightScheme::kIngested:
      if (!record.ingested_weights) {
        throw CapabilityError("record carries no ingested weights");
      }
      weights = {*record.ingested_weights, WeightScheme::kIngested};
      break;
  }

  const Extent target = record.input.extent();
  if (options.mode == SaliencyMode::kBaseline) {
    SaliencyMap map = baseline_saliency(features, weights, target);
    return {std::move(weights), std::move(features), std::nullopt, std::move(map)};
  }
  ConceptorCamResult result = conceptor_cam(features, weights, options.alpha, target);
  SaliencyMap map = options.mode == SaliencyMode::kPositive ? result.positive_map
                    : options.mode == SaliencyMode::kComplementary
                        ? result.complementary_map
                        : result.comprehensive_map;
  return {std::move(weights), std::move(features), std::move(result), std::move(map)};
}

}  // namespace ccam
