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

// Record-level pipeline: pick channel weights by scheme, optionally
// tanh-normalize the features, and produce the saliency map for a mode.

#include <optional>

#include "ccam/backend.hpp"
#include "ccam/cam.hpp"
#include "ccam/record.hpp"

namespace ccam {

inline constexpr double kDefaultAperture = 1.0;
inline constexpr double kMaxAperture = 100.0;

struct ExplainOptions {
  SaliencyMode mode = SaliencyMode::kComprehensive;
  WeightScheme scheme = WeightScheme::kScore;
  double alpha = kDefaultAperture;
  // Unset means the scheme default: on for grad and cam, off otherwise.
  std::optional<bool> tanh;
  ScoreSpace score_space = ScoreSpace::kSoftmax;
};

bool resolve_tanh(const ExplainOptions& options);

struct Explanation {
  ChannelWeights weights;
  FeatureMap features;  // after optional tanh normalization
  std::optional<ConceptorCamResult> intermediates;
  SaliencyMap saliency;
};

// Throws CapabilityError when the record lacks what the scheme needs, and
// InvalidArgument when the requested score space differs from the record's.
Explanation explain(const EvidenceRecord& record, const ModelBackend& backend,
                    const ExplainOptions& options);

}  // namespace ccam
