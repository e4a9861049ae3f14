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

#include "ccam/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ccam/error.hpp"

namespace ccam {

namespace fs = std::filesystem;
using nlohmann::json;

double average_increase(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw InvalidArgument("average_increase: no items");
  std::size_t increased = 0;
  for (const EvalPair& p : pairs) {
    if (p.base_score < p.explanation_score) ++increased;
  }
  return static_cast<double>(increased) / static_cast<double>(pairs.size()) * 100.0;
}

double average_drop(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw InvalidArgument("average_drop: no items");
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const EvalPair& p = pairs[i];
    if (!(p.base_score > 0.0)) {
      throw InvalidArgument("average_drop: item " + std::to_string(i) +
                            " has base score " + std::to_string(p.base_score) +
                            ", relative drop is undefined");
    }
    sum += std::max(0.0, p.base_score - p.explanation_score) / p.base_score;
  }
  return sum / static_cast<double>(pairs.size()) * 100.0;
}

std::vector<ManifestItem> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw IoError(path.string() + ": manifest must be a JSON list");
  std::vector<ManifestItem> items;
  const fs::path base = path.parent_path();
  try {
    for (const auto& entry : doc) {
      ManifestItem item;
      item.record = base / entry.at("record").get<std::string>();
      const std::string mode = entry.value("mode", std::string("comprehensive"));
      const std::string scheme = entry.value("weights", std::string("score"));
      const std::string space = entry.value("score_space", std::string("softmax"));
      const auto m = parse_saliency_mode(mode);
      const auto w = parse_weight_scheme(scheme);
      const auto s = parse_score_space(space);
      if (!m) throw IoError(path.string() + ": unknown mode '" + mode + "'");
      if (!w) throw IoError(path.string() + ": unknown weights '" + scheme + "'");
      if (!s) throw IoError(path.string() + ": unknown score_space '" + space + "'");
      item.options.mode = *m;
      item.options.scheme = *w;
      item.options.score_space = *s;
      item.options.alpha = entry.value("alpha", kDefaultAperture);
      if (entry.contains("tanh")) item.options.tanh = entry.at("tanh").get<bool>();
      items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return items;
}

std::unique_ptr<ModelBackend> default_backend(const EvidenceRecord& record) {
  if (record.model && record.explanation_scores.empty()) {
    return make_live_backend(record);
  }
  return make_replay_backend(record);
}

namespace {

EvalRow evaluate_item(const ManifestItem& item, const BackendFactory& factory) {
  EvalRow row;
  row.record = item.record.generic_string();
  row.mode = std::string(to_string(item.options.mode));
  row.weights = std::string(to_string(item.options.scheme));
  row.alpha = item.options.alpha;

  const EvidenceRecord record = load_record(item.record);
  try {
    const std::unique_ptr<ModelBackend> backend = factory(record);
    const Explanation e = explain(record, *backend, item.options);
    const std::optional<Vector> scores =
        backend->explanation_scores(e.saliency, item.options.mode);
    if (!scores) {
      row.diagnostic = "no explanation score for mode " + row.mode;
      return row;
    }
    const auto c = static_cast<Eigen::Index>(record.class_index);
    row.base_score = backend->base_scores()(c);
    row.explanation_score = (*scores)(c);
    if (!(row.base_score > 0.0)) {
      row.diagnostic = "base score is zero, relative drop undefined";
      return row;
    }
    row.evaluated = true;
  } catch (const CapabilityError& err) {
    row.diagnostic = err.what();
  }
  return row;
}

}  // namespace

EvalReport evaluate_manifest(const std::vector<ManifestItem>& items,
                             const BackendFactory& factory, std::size_t jobs) {
  if (items.empty()) throw InvalidArgument("evaluate_manifest: empty manifest");
  EvalReport report;
  report.rows.resize(items.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        report.rows[i] = evaluate_item(items[i], factory);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, items.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EvalPair> pairs;
  for (const EvalRow& row : report.rows) {
    if (row.evaluated) {
      pairs.push_back({row.base_score, row.explanation_score});
    } else {
      ++report.skipped;
    }
  }
  report.n = pairs.size();
  if (!pairs.empty()) {
    report.average_increase = average_increase(pairs);
    report.average_drop = average_drop(pairs);
  }
  return report;
}

std::string report_json(const EvalReport& report) {
  json doc;
  doc["n"] = report.n;
  doc["skipped"] = report.skipped;
  doc["average_increase"] =
      report.average_increase ? json(*report.average_increase) : json(nullptr);
  doc["average_drop"] =
      report.average_drop ? json(*report.average_drop) : json(nullptr);
  json rows = json::array();
  for (const EvalRow& row : report.rows) {
    json r;
    r["record"] = row.record;
    r["mode"] = row.mode;
    r["weights"] = row.weights;
    r["alpha"] = row.alpha;
    r["status"] = row.evaluated ? "ok" : "skipped";
    if (row.evaluated) {
      r["base_score"] = row.base_score;
      r["explanation_score"] = row.explanation_score;
    } else {
      r["diagnostic"] = row.diagnostic;
    }
    rows.push_back(std::move(r));
  }
  doc["items"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
  std::size_t record_width = 6;
  for (const EvalRow& row : report.rows) {
    record_width = std::max(record_width, row.record.size());
  }
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(record_width)) << "record" << "  "
     << std::setw(13) << "mode" << "  " << std::setw(8) << "weights" << "  "
     << std::right << std::setw(7) << "alpha" << "  " << std::setw(10) << "base"
     << "  " << std::setw(10) << "explained" << "  status\n";
  os << std::fixed;
  for (const EvalRow& row : report.rows) {
    os << std::left << std::setw(static_cast<int>(record_width)) << row.record
       << "  " << std::setw(13) << row.mode << "  " << std::setw(8) << row.weights
       << "  " << std::right << std::setprecision(3) << std::setw(7) << row.alpha
       << "  ";
    if (row.evaluated) {
      os << std::setprecision(6) << std::setw(10) << row.base_score << "  "
         << std::setw(10) << row.explanation_score << "  ok\n";
    } else {
      os << std::setw(10) << "-" << "  " << std::setw(10) << "-"
         << "  skipped: " << row.diagnostic << '\n';
    }
  }
  os << std::setprecision(4);
  os << "\nN = " << report.n << ", skipped = " << report.skipped << '\n';
  if (report.average_increase) {
    os << "Average Increase = " << *report.average_increase << '\n'
       << "Average Drop     = " << *report.average_drop << '\n';
  } else {
    os << "Average Increase = n/a\nAverage Drop     = n/a\n";
  }
  return os.str();
}

}  // namespace ccam
