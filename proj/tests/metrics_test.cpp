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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <random>

#include "ccam/error.hpp"
#include "ccam/record.hpp"
#include "test_util.hpp"

namespace ccam {
namespace {

namespace fs = std::filesystem;
using testing::data_path;
using testing::Gen;

const std::vector<EvalPair> kTwoItems = {{0.5, 0.6}, {0.8, 0.7}};

TEST(AverageIncrease, Examples) {
  EXPECT_EQ(average_increase(kTwoItems), 50.0);
  EXPECT_EQ(average_increase(std::vector<EvalPair>{{0.3, 0.3}, {0.9, 0.9}}), 0.0);
  EXPECT_EQ(average_increase(std::vector<EvalPair>{{0.1, 0.2}}), 100.0);
  EXPECT_THROW(average_increase({}), InvalidArgument);
}

TEST(AverageDrop, Examples) {
  // 0.8 - 0.7 is not exact in binary; the hand value 6.25 holds to rounding.
  EXPECT_NEAR(average_drop(kTwoItems), 6.25, 1e-12);
  EXPECT_EQ(average_drop(std::vector<EvalPair>{{0.5, 0.5}, {0.2, 0.9}}), 0.0);
  EXPECT_EQ(average_drop(std::vector<EvalPair>{{0.5, 0.25}}), 50.0);
  EXPECT_THROW(average_drop({}), InvalidArgument);
}

TEST(AverageDrop, DyadicInputsAreExact) {
  EXPECT_EQ(average_drop(std::vector<EvalPair>{{0.5, 0.75}, {1.0, 0.875}}), 6.25);
}

TEST(AverageDrop, ZeroBaseNamesItem) {
  std::vector<EvalPair> p = {{0.5, 0.4}, {0.0, 0.1}};
  try {
    average_drop(p);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("item 1"), std::string::npos);
  }
}

TEST(Metrics, BoundsAndPermutationInvariance) {
  Gen gen(501);
  for (int i = 0; i < 200; ++i) {
    std::vector<EvalPair> p(gen.size(1, 20));
    for (auto& e : p) e = {gen.real(1e-3, 1.0), gen.real(0.0, 1.0)};
    double ai = average_increase(p), ad = average_drop(p);
    EXPECT_GE(ai, 0.0);
    EXPECT_LE(ai, 100.0);
    EXPECT_GE(ad, 0.0);
    EXPECT_LE(ad, 100.0);
    std::shuffle(p.begin(), p.end(), gen.engine());
    EXPECT_EQ(average_increase(p), ai);
    EXPECT_NEAR(average_drop(p), ad, 1e-12);
  }
}

TEST(Manifest, LoadsFixture) {
  auto items = load_manifest(data_path("metrics/manifest.json"));
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].record, data_path("metrics/item_a"));
  EXPECT_EQ(items[0].options.mode, SaliencyMode::kComprehensive);
  EXPECT_EQ(items[0].options.scheme, WeightScheme::kScore);
  EXPECT_EQ(items[0].options.alpha, 1.0);
  EXPECT_FALSE(items[0].options.tanh.has_value());
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ccam_metrics_" + std::to_string(::testing::UnitTest::GetInstance()
                                                  ->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  fs::path dir_;
};

using ManifestErrors = TempDir;

TEST_F(ManifestErrors, Malformed) {
  EXPECT_THROW(load_manifest(dir_ / "absent.json"), IoError);
  EXPECT_THROW(load_manifest(write("a.json", "{not json")), IoError);
  EXPECT_THROW(load_manifest(write("b.json", "{}")), IoError);
  EXPECT_THROW(load_manifest(write("c.json", R"([{"mode": "positive"}])")), IoError);
  EXPECT_THROW(load_manifest(write("d.json", R"([{"record": "x", "mode": "bogus"}])")),
               IoError);
  auto items = load_manifest(write(
      "e.json", R"([{"record": "x", "weights": "grad", "alpha": 2.5, "tanh": false,
                     "score_space": "logit", "mode": "baseline"}])"));
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].options.scheme, WeightScheme::kGrad);
  EXPECT_EQ(items[0].options.alpha, 2.5);
  EXPECT_EQ(items[0].options.tanh, false);
  EXPECT_EQ(items[0].options.score_space, ScoreSpace::kLogit);
  EXPECT_EQ(items[0].options.mode, SaliencyMode::kBaseline);
}

TEST(Evaluate, TwoSyntheticRecords) {
  auto items = load_manifest(data_path("metrics/manifest.json"));
  EvalReport r = evaluate_manifest(items, default_backend);
  EXPECT_EQ(r.n, 2u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_EQ(*r.average_increase, 50.0);
  // Scores are stored as float32, which moves AD off 6.25 by about 2e-6.
  EXPECT_NEAR(*r.average_drop, 6.25, 1e-5);
  EXPECT_EQ(r.rows[0].explanation_score, static_cast<double>(0.6f));
  EXPECT_EQ(r.rows[1].base_score, static_cast<double>(0.8f));
}

TEST(Evaluate, EmptyManifest) {
  EXPECT_THROW(evaluate_manifest({}, default_backend), InvalidArgument);
}

TEST(Evaluate, MissingCapabilitiesAreSkippedAndReported) {
  auto items = load_manifest(data_path("metrics/manifest.json"));
  items[0].options.scheme = WeightScheme::kGrad;
  items[1].options.mode = SaliencyMode::kPositive;
  EvalReport r = evaluate_manifest(items, default_backend);
  EXPECT_EQ(r.n, 0u);
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_FALSE(r.average_increase.has_value());
  EXPECT_FALSE(r.rows[0].evaluated);
  EXPECT_NE(r.rows[0].diagnostic.find("gradient"), std::string::npos);
  EXPECT_NE(r.rows[1].diagnostic.find("positive"), std::string::npos);
  std::string table = report_table(r);
  EXPECT_NE(table.find("skipped"), std::string::npos);
}

TEST(Evaluate, PartialSkipUsesEvaluatedItemsOnly) {
  auto items = load_manifest(data_path("metrics/manifest.json"));
  items[0].options.mode = SaliencyMode::kBaseline;
  EvalReport r = evaluate_manifest(items, default_backend);
  EXPECT_EQ(r.n, 1u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(*r.average_increase, 0.0);
}

TEST(Evaluate, MissingRecordIsIoError) {
  std::vector<ManifestItem> items(1);
  items[0].record = data_path("metrics/absent");
  EXPECT_THROW(evaluate_manifest(items, default_backend), IoError);
}

TEST(Evaluate, ParallelMatchesSerial) {
  auto base = load_manifest(data_path("metrics/manifest.json"));
  std::vector<ManifestItem> items;
  for (int i = 0; i < 10; ++i) items.insert(items.end(), base.begin(), base.end());
  items[3].options.scheme = WeightScheme::kCam;
  EvalReport serial = evaluate_manifest(items, default_backend, 1);
  EvalReport parallel = evaluate_manifest(items, default_backend, 4);
  EXPECT_EQ(report_json(serial), report_json(parallel));
  EXPECT_EQ(serial.skipped, 1u);
}

TEST(Evaluate, LiveBackendOnGoldenRecord) {
  EvidenceRecord rec = load_record(data_path("golden_record"));
  ManifestItem item;
  item.record = data_path("golden_record");
  EvalReport replay = evaluate_manifest({item}, default_backend);
  EvalReport live = evaluate_manifest({item}, [](const EvidenceRecord& r) {
    return std::unique_ptr<ModelBackend>(make_live_backend(r));
  });
  ASSERT_EQ(replay.n, 1u);
  ASSERT_EQ(live.n, 1u);
  EXPECT_EQ(replay.rows[0].base_score, live.rows[0].base_score);
  EXPECT_EQ(replay.rows[0].explanation_score, live.rows[0].explanation_score);
}

TEST(Report, JsonShape) {
  EvalReport r = evaluate_manifest(load_manifest(data_path("metrics/manifest.json")),
                                   default_backend);
  auto doc = nlohmann::json::parse(report_json(r));
  EXPECT_EQ(doc["n"], 2);
  EXPECT_EQ(doc["skipped"], 0);
  EXPECT_EQ(doc["average_increase"], 50.0);
  ASSERT_EQ(doc["items"].size(), 2u);
  EXPECT_EQ(doc["items"][0]["status"], "ok");
  EXPECT_NE(report_table(r).find("Average Increase"), std::string::npos);
}

}  // namespace
}  // namespace ccam
