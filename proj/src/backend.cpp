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

#include "ccam/backend.hpp"

#include "ccam/error.hpp"
#include "ccam/tensor_io.hpp"

namespace ccam {

ReplayBackend::ReplayBackend(EvidenceRecord record) : record_(std::move(record)) {
  record_.validate();
}

std::size_t ReplayBackend::num_channels() const {
  return record_.features.channels();
}

Vector ReplayBackend::base_scores() const { return record_.base_scores; }

Vector ReplayBackend::masked_scores(std::size_t k) const {
  if (k >= num_channels()) {
    throw InvalidArgument("masked score requested for channel " +
                          std::to_string(k) + " of " +
                          std::to_string(num_channels()));
  }
  return record_.masked_scores.row(static_cast<Eigen::Index>(k)).transpose();
}

std::optional<Vector> ReplayBackend::explanation_scores(
    const SaliencyMap& s, SaliencyMode mode) const {
  if (s.is_zero() && record_.black_scores) return *record_.black_scores;
  const auto it = record_.explanation_scores.find(std::string(to_string(mode)));
  if (it == record_.explanation_scores.end()) return std::nullopt;
  return it->second;
}

LiveBackend::LiveBackend(std::shared_ptr<const ToyCnnSpec> spec, Image image,
                         std::string tap_layer, ScoreSpace space)
    : spec_(std::move(spec)),
      image_(std::move(image)),
      tap_name_(std::move(tap_layer)),
      tap_index_(spec_->layer_index(tap_name_)),
      space_(space) {
  ForwardResult fwd = toy_forward(*spec_, image_, tap_index_);
  features_ = FeatureMap(narrow(fwd.tap->matrix()), fwd.tap->spatial());
  base_ = narrow(space_ == ScoreSpace::kSoftmax ? fwd.probabilities : fwd.logits);
  masked_.reserve(features_.channels());
  for (std::size_t k = 0; k < features_.channels(); ++k) {
    masked_.push_back(scores_for(apply_mask(image_, channel_mask(k))));
  }
}

std::size_t LiveBackend::num_channels() const { return features_.channels(); }

Vector LiveBackend::base_scores() const { return base_; }

Vector LiveBackend::masked_scores(std::size_t k) const {
  if (k >= masked_.size()) {
    throw InvalidArgument("masked score requested for channel " +
                          std::to_string(k) + " of " +
                          std::to_string(masked_.size()));
  }
  return masked_[k];
}

std::optional<Vector> LiveBackend::explanation_scores(const SaliencyMap& s,
                                                      SaliencyMode) const {
  return scores_for(apply_mask(image_, s));
}

Vector LiveBackend::scores_for(const Image& image) const {
  const ForwardResult fwd = toy_forward(*spec_, image);
  return narrow(space_ == ScoreSpace::kSoftmax ? fwd.probabilities : fwd.logits);
}

SaliencyMap LiveBackend::channel_mask(std::size_t k) const {
  return rescale_psi(features_.channel_grid(k), image_.extent());
}

EvidenceRecord LiveBackend::to_record(std::size_t class_index) const {
  EvidenceRecord r;
  r.input = image_;
  r.features = features_;
  r.layer = tap_name_;
  r.class_index = class_index;
  r.score_space = space_;
  r.base_scores = base_;
  r.masked_scores.resize(static_cast<Eigen::Index>(masked_.size()), base_.size());
  for (std::size_t k = 0; k < masked_.size(); ++k) {
    r.masked_scores.row(static_cast<Eigen::Index>(k)) = masked_[k].transpose();
  }
  r.black_scores = scores_for(Image::black(image_.height(), image_.width()));
  r.validate();
  return r;
}

std::unique_ptr<ModelBackend> make_replay_backend(const EvidenceRecord& record) {
  return std::make_unique<ReplayBackend>(record);
}

std::unique_ptr<LiveBackend> make_live_backend(const EvidenceRecord& record) {
  if (!record.model) {
    throw CapabilityError("record does not name a model for live evaluation");
  }
  auto spec = std::make_shared<const ToyCnnSpec>(ToyCnnSpec::load_json(*record.model));
  return std::make_unique<LiveBackend>(std::move(spec), record.input,
                                       record.layer, record.score_space);
}

}  // namespace ccam
