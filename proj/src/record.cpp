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

#include "ccam/record.hpp"

#include <fstream>

#include <json.hpp>

#include "ccam/error.hpp"
#include "ccam/tensor_io.hpp"

namespace ccam {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ScoreSpace space) {
  return space == ScoreSpace::kSoftmax ? "softmax" : "logit";
}

std::optional<ScoreSpace> parse_score_space(std::string_view text) {
  if (text == "softmax") return ScoreSpace::kSoftmax;
  if (text == "logit") return ScoreSpace::kLogit;
  return std::nullopt;
}

void EvidenceRecord::validate() const {
  const std::size_t k = features.channels();
  const std::size_t n = num_classes();
  if (n == 0) throw DimensionError("record has no base scores");
  if (static_cast<std::size_t>(masked_scores.rows()) != k) {
    throw DimensionError("masked score matrix has " +
                         std::to_string(masked_scores.rows()) +
                         " rows, feature map has " + std::to_string(k) +
                         " channels");
  }
  if (static_cast<std::size_t>(masked_scores.cols()) != n) {
    throw DimensionError("masked score matrix has " +
                         std::to_string(masked_scores.cols()) +
                         " columns, expected " + std::to_string(n) + " classes");
  }
  if (class_index >= n) {
    throw InvalidArgument("class_index " + std::to_string(class_index) +
                          " out of range for " + std::to_string(n) + " classes");
  }
  if (input.height() < features.spatial().height ||
      input.width() < features.spatial().width) {
    throw DimensionError("feature map is larger than the input image");
  }
  if (gradients && (static_cast<std::size_t>(gradients->rows()) !=
                        features.positions() ||
                    static_cast<std::size_t>(gradients->cols()) != k)) {
    throw DimensionError("gradients do not match the feature map shape");
  }
  if (fc_weights && static_cast<std::size_t>(fc_weights->cols()) != k) {
    throw DimensionError("fc_weights must have one column per channel");
  }
  if (ingested_weights && static_cast<std::size_t>(ingested_weights->size()) != k) {
    throw DimensionError("ingested weights must have one entry per channel");
  }
  if (black_scores && static_cast<std::size_t>(black_scores->size()) != n) {
    throw DimensionError("black_scores must have one entry per class");
  }
  for (const auto& [mode, row] : explanation_scores) {
    if (!parse_saliency_mode(mode)) {
      throw InvalidArgument("unknown explanation score mode '" + mode + "'");
    }
    if (static_cast<std::size_t>(row.size()) != n) {
      throw DimensionError("explanation scores for '" + mode +
                           "' must have one entry per class");
    }
  }
}

EvidenceRecord load_record(const fs::path& dir) {
  const fs::path manifest = dir / kRecordFileName;
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open " + manifest.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(manifest.string() + ": " + e.what());
  }
  const auto tensor = [&](const std::string& key) {
    return load_tensor(dir / doc.at(key).get<std::string>());
  };
  try {
    if (doc.value("format", std::string()) != kRecordFormat) {
      throw IoError(manifest.string() + ": format must be \"" +
                    std::string(kRecordFormat) + "\"");
    }
    EvidenceRecord r;
    r.layer = doc.value("layer", std::string());
    r.class_index = doc.at("class_index").get<std::size_t>();
    const std::string space = doc.value("score_space", std::string("softmax"));
    const auto parsed = parse_score_space(space);
    if (!parsed) throw IoError(manifest.string() + ": unknown score_space '" + space + "'");
    r.score_space = *parsed;

    r.input = Image::from_tensor(tensor("input"));
    const auto spatial = doc.at("feature_spatial").get<std::vector<std::size_t>>();
    if (spatial.size() != 2) {
      throw IoError(manifest.string() + ": feature_spatial must be [h, w]");
    }
    r.features = FeatureMap(to_matrix(tensor("features")), {spatial[0], spatial[1]});
    r.base_scores = to_vector(tensor("base_scores"));
    r.masked_scores = to_matrix(tensor("masked_scores"));
    if (doc.contains("gradients")) r.gradients = to_matrix(tensor("gradients"));
    if (doc.contains("fc_weights")) r.fc_weights = to_matrix(tensor("fc_weights"));
    if (doc.contains("ingested_weights")) {
      r.ingested_weights = to_vector(tensor("ingested_weights"));
    }
    if (doc.contains("black_scores")) r.black_scores = to_vector(tensor("black_scores"));
    if (doc.contains("explanation_scores")) {
      for (const auto& [mode, file] : doc.at("explanation_scores").items()) {
        r.explanation_scores[mode] =
            to_vector(load_tensor(dir / file.get<std::string>()));
      }
    }
    if (doc.contains("model")) {
      r.model = fs::absolute(dir / doc.at("model").get<std::string>());
    }
    r.validate();
    return r;
  } catch (const json::exception& e) {
    throw IoError(manifest.string() + ": " + e.what());
  } catch (const DimensionError& e) {
    throw IoError(manifest.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(manifest.string() + ": " + e.what());
  }
}

void save_record(const EvidenceRecord& record, const fs::path& dir) {
  record.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  json doc;
  doc["format"] = kRecordFormat;
  doc["layer"] = record.layer;
  doc["class_index"] = record.class_index;
  doc["score_space"] = std::string(to_string(record.score_space));
  doc["feature_spatial"] = {record.features.spatial().height,
                            record.features.spatial().width};
  const auto put = [&](const std::string& key, const Tensor& t) {
    const std::string file = key + ".cct";
    save_tensor(dir / file, t);
    doc[key] = file;
  };
  put("input", record.input.to_tensor());
  put("features", tensor_from(record.features.matrix()));
  put("base_scores", tensor_from(record.base_scores));
  put("masked_scores", tensor_from(record.masked_scores));
  if (record.gradients) put("gradients", tensor_from(*record.gradients));
  if (record.fc_weights) put("fc_weights", tensor_from(*record.fc_weights));
  if (record.ingested_weights) put("ingested_weights", tensor_from(*record.ingested_weights));
  if (record.black_scores) put("black_scores", tensor_from(*record.black_scores));
  if (!record.explanation_scores.empty()) {
    json rows = json::object();
    for (const auto& [mode, row] : record.explanation_scores) {
      const std::string file = "explanation_" + mode + ".cct";
      save_tensor(dir / file, tensor_from(row));
      rows[mode] = file;
    }
    doc["explanation_scores"] = rows;
  }
  if (record.model) {
    doc["model"] = fs::relative(*record.model, fs::absolute(dir)).generic_string();
  }
  std::ofstream out(dir / kRecordFileName, std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kRecordFileName).string());
  out << doc.dump(2) << '\n';
}

}  // namespace ccam
