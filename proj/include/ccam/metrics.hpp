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
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccam/backend.hpp"
#include "ccam/explain.hpp"
#include "ccam/record.hpp"

namespace ccam {

// Class-c score on the original input and on the saliency-masked input.
struct EvalPair {
  double base_score = 0.0;
  double explanation_score = 0.0;
};

// 100 * (number of items with base < explanation) / N.
double average_increase(std::span<const EvalPair> pairs);

// 100 * mean over items of max(0, base - explanation) / base. Every base
// score must be positive; the first offending item is named in the error.
double average_drop(std::span<const EvalPair> pairs);

struct ManifestItem {
  std::filesystem::path record;
  ExplainOptions options;
};

// JSON list of {"record", "mode", "weights", "alpha", "tanh", "score_space"};
// record paths resolve against the manifest's directory. Only "record" is
// required.
std::vector<ManifestItem> load_manifest(const std::filesystem::path& path);

struct EvalRow {
  std::string record;
  std::string mode;
  std::string weights;
  double alpha = 0.0;
  bool evaluated = false;
  double base_score = 0.0;
  double explanation_score = 0.0;
  std::string diagnostic;  // why the item was skipped
};

struct EvalReport {
  std::size_t n = 0;        // evaluated items
  std::size_t skipped = 0;
  std::optional<double> average_increase;
  std::optional<double> average_drop;
  std::vector<EvalRow> rows;  // manifest order
};

using BackendFactory =
    std::function<std::unique_ptr<ModelBackend>(const EvidenceRecord&)>;

// Replay for plain records; live when the record names a toy model and
// carries no explanation rows.
std::unique_ptr<ModelBackend> default_backend(const EvidenceRecord& record);

// Evaluates every item (with up to `jobs` workers) and aggregates AI / AD
// over the items that could be evaluated. Throws InvalidArgument for an
// empty manifest.
EvalReport evaluate_manifest(const std::vector<ManifestItem>& items,
                             const BackendFactory& factory, std::size_t jobs = 1);

std::string report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

}  // namespace ccam
