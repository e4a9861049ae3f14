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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccam/cam.hpp"
#include "ccam/image.hpp"
#include "ccam/linalg.hpp"
#include "ccam/record.hpp"
#include "ccam/toy_cnn.hpp"

namespace ccam {

// Model evaluation contract used by Score-CAM and the metrics harness.
// Implementations are read-only after construction and safe to query from
// several threads.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual std::size_t num_channels() const = 0;

  // Class scores f(X).
  virtual Vector base_scores() const = 0;

  // Class scores f(X o Psi(F_k)). Throws InvalidArgument when k is out of
  // range.
  virtual Vector masked_scores(std::size_t k) const = 0;

  // Class scores on X o s for a saliency map produced in `mode`, or nullopt
  // when this backend cannot answer.
  virtual std::optional<Vector> explanation_scores(const SaliencyMap& s,
                                                   SaliencyMode mode) const = 0;
};

// Answers from a recorded EvidenceRecord, verbatim.
class ReplayBackend final : public ModelBackend {
 public:
  explicit ReplayBackend(EvidenceRecord record);

  std::size_t num_channels() const override;
  Vector base_scores() const override;
  Vector masked_scores(std::size_t k) const override;
  // An all-zero map is answered from the black-input row when recorded;
  // otherwise the recorded row for `mode` is returned.
  std::optional<Vector> explanation_scores(const SaliencyMap& s,
                                           SaliencyMode mode) const override;

  const EvidenceRecord& record() const { return record_; }

 private:
  EvidenceRecord record_;
};

// Runs the toy CNN. Scores and the tap feature map are rounded to float32,
// matching what a float32 network (and the CCT1 interchange) carries, so a
// record exported from this backend replays bit-identically.
class LiveBackend final : public ModelBackend {
 public:
  LiveBackend(std::shared_ptr<const ToyCnnSpec> spec, Image image,
              std::string tap_layer, ScoreSpace space = ScoreSpace::kSoftmax);

  std::size_t num_channels() const override;
  Vector base_scores() const override;
  Vector masked_scores(std::size_t k) const override;
  std::optional<Vector> explanation_scores(const SaliencyMap& s,
                                           SaliencyMode mode) const override;

  const FeatureMap& feature_map() const { return features_; }
  const Image& image() const { return image_; }
  const std::string& tap_layer() const { return tap_name_; }
  ScoreSpace score_space() const { return space_; }

  // Class scores of the model on an arbitrary image.
  Vector scores_for(const Image& image) const;

  // Score-CAM mask for channel k: Psi of the channel at input resolution.
  SaliencyMap channel_mask(std::size_t k) const;

  // Record carrying this backend's answers for `class_index`. Explanation
  // score rows are not filled in.
  EvidenceRecord to_record(std::size_t class_index) const;

 private:
  std::shared_ptr<const ToyCnnSpec> spec_;
  Image image_;
  std::string tap_name_;
  std::size_t tap_index_;
  ScoreSpace space_;
  FeatureMap features_{Matrix::Zero(1, 1), Extent{1, 1}};
  Vector base_;
  std::vector<Vector> masked_;
};

std::unique_ptr<ModelBackend> make_replay_backend(const EvidenceRecord& record);

// Live backend for a record that names a toy model; the record's input,
// layer and score space are used.
std::unique_ptr<LiveBackend> make_live_backend(const EvidenceRecord& record);

}  // namespace ccam
