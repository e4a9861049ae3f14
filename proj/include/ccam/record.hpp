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

// EvidenceRecord: everything needed to explain one (image, class, layer)
// without running the model. On disk a record is a directory holding
// record.json plus CCT1 tensors:
//
//   {
//     "format": "ccam-record/1",
//     "layer": "conv2",
//     "class_index": 1,
//     "score_space": "softmax",            // or "logit"
//     "feature_spatial": [h, w],
//     "input": "input.cct",                // H x W x 3
//     "features": "features.cct",          // M x K
//     "base_scores": "base_scores.cct",    // N
//     "masked_scores": "masked_scores.cct",// K x N
//     "gradients": "gradients.cct",        // optional, M x K
//     "fc_weights": "fc_weights.cct",      // optional, N2 x K
//     "ingested_weights": "weights.cct",   // optional, K
//     "black_scores": "black_scores.cct",  // optional, N
//     "explanation_scores": {              // optional, mode -> N
//       "comprehensive": "explanation_comprehensive.cct"
//     },
//     "model": "../toy/model.json"          // optional, enables live replay
//   }
//
// Relative paths resolve against the record directory.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ccam/cam.hpp"
#include "ccam/image.hpp"
#include "ccam/linalg.hpp"

namespace ccam {

enum class ScoreSpace { kSoftmax, kLogit };

std::string_view to_string(ScoreSpace space);
std::optional<ScoreSpace> parse_score_space(std::string_view text);

struct EvidenceRecord {
  Image input = Image::black(1, 1);
  FeatureMap features{Matrix::Zero(1, 1), Extent{1, 1}};
  std::string layer;
  std::size_t class_index = 0;
  ScoreSpace score_space = ScoreSpace::kSoftmax;
  Vector base_scores;
  Matrix masked_scores;  // K x num_classes
  std::optional<Matrix> gradients;
  std::optional<Matrix> fc_weights;
  std::optional<Vector> ingested_weights;
  std::optional<Vector> black_scores;
  std::map<std::string, Vector> explanation_scores;
  // Toy model specification for live evaluation, absolute after loading.
  std::optional<std::filesystem::path> model;

  std::size_t num_classes() const {
    return static_cast<std::size_t>(base_scores.size());
  }

  // Throws DimensionError / InvalidArgument on inconsistent contents.
  void validate() const;
};

inline constexpr const char* kRecordFileName = "record.json";
inline constexpr const char* kRecordFormat = "ccam-record/1";

EvidenceRecord load_record(const std::filesystem::path& dir);

// Writes record.json and one tensor per field into `dir` (created if
// missing). Tensor file names are fixed; values are narrowed to float32.
void save_record(const EvidenceRecord& record, const std::filesystem::path& dir);

}  // namespace ccam
