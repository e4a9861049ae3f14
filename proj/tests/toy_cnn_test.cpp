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

#include "ccam/toy_cnn.hpp"

#include <gtest/gtest.h>

#include "ccam/error.hpp"
#include "ccam/image.hpp"
#include "ccam/tensor_io.hpp"
#include "test_util.hpp"

namespace ccam {
namespace {

using testing::bit_equal;
using testing::data_path;
using testing::Gen;

ToyLayer layer(LayerKind kind, std::vector<double> w = {},
               std::vector<double> b = {}) {
  return ToyLayer{"", kind, std::move(w), std::move(b)};
}

Image random_image(Gen& gen, std::size_t h, std::size_t w) {
  std::vector<double> v(h * w * 3);
  for (double& x : v) x = gen.real(0.0, 1.0);
  return Image(h, w, std::move(v));
}

TEST(ToyCnn, DenseZeroWeightsGiveUniformSoftmax) {
  ToyCnnSpec spec({1, 1}, {layer(LayerKind::kDense, std::vector<double>(6, 0.0),
                                 {0.0, 0.0}),
                           layer(LayerKind::kSoftmax)});
  ForwardResult r = toy_forward(spec, Image(1, 1, {0.3, 0.6, 0.9}));
  EXPECT_EQ(r.probabilities(0), 0.5);
  EXPECT_EQ(r.probabilities(1), 0.5);
  EXPECT_EQ(r.logits, Vector::Zero(2));
  EXPECT_EQ(spec.num_classes(), 2u);
}

TEST(ToyCnn, CenterOneKernelIsIdentity) {
  std::vector<double> w(3 * 3 * 9, 0.0);
  for (std::size_t c = 0; c < 3; ++c) w[((c * 3 + c) * 3 + 1) * 3 + 1] = 1.0;
  ToyLayer conv = layer(LayerKind::kConv3x3, w, {0.0, 0.0, 0.0});
  Gen gen(401);
  Activation in = to_activation(random_image(gen, 5, 4));
  Activation out = apply_layer(conv, in);
  EXPECT_EQ(out.values, in.values);
}

TEST(ToyCnn, MaxPool) {
  Activation in{2, 2, 1, {1, 2, 3, 4}};
  Activation out = apply_layer(layer(LayerKind::kMaxPool2x2), in);
  ASSERT_EQ(out.values.size(), 1u);
  EXPECT_EQ(out.values[0], 4.0);
  Activation odd{3, 3, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
  Activation o = apply_layer(layer(LayerKind::kMaxPool2x2), odd);
  EXPECT_EQ(o.height, 1u);
  EXPECT_EQ(o.values[0], 5.0);
}

TEST(ToyCnn, GlobalAvgPoolAndRelu) {
  Activation in{2, 1, 2, {1, -4, 3, 2}};
  Activation gap = apply_layer(layer(LayerKind::kGlobalAvgPool), in);
  EXPECT_EQ(gap.values, (std::vector<double>{2, -1}));
  Activation relu = apply_layer(layer(LayerKind::kRelu), in);
  EXPECT_EQ(relu.values, (std::vector<double>{1, 0, 3, 2}));
}

TEST(ToyCnn, ConvIsLinearWithoutBias) {
  Gen gen(402);
  for (int i = 0; i < 50; ++i) {
    std::size_t cin = gen.size(1, 3), cout = gen.size(1, 3);
    std::size_t h = gen.size(1, 5), w = gen.size(1, 5);
    std::vector<double> kw(cout * cin * 9);
    for (double& v : kw) v = gen.real(-1, 1);
    ToyLayer conv = layer(LayerKind::kConv3x3, kw, std::vector<double>(cout, 0.0));
    Activation x{h, w, cin, std::vector<double>(h * w * cin)};
    Activation y = x;
    for (double& v : x.values) v = gen.real(-1, 1);
    for (double& v : y.values) v = gen.real(-1, 1);
    double a = gen.real(-2, 2), b = gen.real(-2, 2);
    Activation mix = x;
    for (std::size_t j = 0; j < mix.values.size(); ++j)
      mix.values[j] = a * x.values[j] + b * y.values[j];
    Activation cx = apply_layer(conv, x), cy = apply_layer(conv, y);
    Activation cm = apply_layer(conv, mix);
    for (std::size_t j = 0; j < cm.values.size(); ++j)
      EXPECT_NEAR(cm.values[j], a * cx.values[j] + b * cy.values[j], 1e-12);
  }
}

TEST(ToyCnn, SpecValidation) {
  EXPECT_THROW(ToyCnnSpec({2, 2}, {layer(LayerKind::kRelu)}), InvalidArgument);
  EXPECT_THROW(ToyCnnSpec({2, 2}, {}), InvalidArgument);
  EXPECT_THROW(ToyCnnSpec({1, 1}, {layer(LayerKind::kDense, {1, 1, 1}, {0}),
                                   layer(LayerKind::kSoftmax)}),
               InvalidArgument);
  EXPECT_THROW(ToyCnnSpec({1, 1}, {layer(LayerKind::kDense, {1, 1}, {0, 0}),
                                   layer(LayerKind::kSoftmax)}),
               DimensionError);
  EXPECT_THROW(ToyCnnSpec({2, 2}, {layer(LayerKind::kConv3x3, {1, 2}, {0}),
                                   layer(LayerKind::kSoftmax)}),
               DimensionError);
  EXPECT_THROW(ToyCnnSpec({1, 1}, {layer(LayerKind::kMaxPool2x2),
                                   layer(LayerKind::kSoftmax)}),
               DimensionError);
  EXPECT_THROW(ToyCnnSpec({1, 1}, {layer(LayerKind::kSoftmax),
                                   layer(LayerKind::kSoftmax)}),
               InvalidArgument);
}

TEST(ToyCnn, DefaultNamesAndLookup) {
  ToyCnnSpec spec({1, 1}, {layer(LayerKind::kRelu), layer(LayerKind::kSoftmax)});
  EXPECT_EQ(spec.layer_index("layer0"), 0u);
  EXPECT_EQ(spec.layer_index("layer1"), 1u);
  EXPECT_THROW(spec.layer_index("conv9"), InvalidArgument);
}

TEST(ToyCnn, RejectsWrongImageSize) {
  ToyCnnSpec spec = ToyCnnSpec::load_json(data_path("toy/model.json"));
  EXPECT_THROW(toy_forward(spec, Image::black(4, 4)), DimensionError);
  EXPECT_THROW(toy_forward(spec, Image::black(8, 8), 99), InvalidArgument);
}

TEST(ToyCnn, LoadsFixtureModel) {
  ToyCnnSpec spec = ToyCnnSpec::load_json(data_path("toy/model.json"));
  EXPECT_EQ(spec.input(), (Extent{8, 8}));
  EXPECT_EQ(spec.layers().size(), 8u);
  EXPECT_EQ(spec.num_classes(), 3u);
  EXPECT_EQ(spec.layer_index("relu2"), 4u);
}

TEST(ToyCnn, MissingModelIsIoError) {
  EXPECT_THROW(ToyCnnSpec::load_json(data_path("toy/absent.json")), IoError);
}

TEST(ToyCnn, FixtureTapMatchesOracleFeatures) {
  ToyCnnSpec spec = ToyCnnSpec::load_json(data_path("toy/model.json"));
  Image img = Image::from_tensor(load_tensor(data_path("toy/image.cct")));
  ForwardResult r = toy_forward(spec, img, spec.layer_index("relu2"));
  ASSERT_TRUE(r.tap.has_value());
  EXPECT_EQ(r.tap->spatial(), (Extent{4, 4}));
  Matrix oracle = to_matrix(load_tensor(data_path("golden_record/features.cct")));
  EXPECT_TRUE(bit_equal(narrow(r.tap->matrix()), oracle));
  Vector base = to_vector(load_tensor(data_path("golden_record/base_scores.cct")));
  EXPECT_TRUE(bit_equal(narrow(r.probabilities), base));
}

TEST(ToyCnn, SoftmaxSumsToOne) {
  ToyCnnSpec spec = ToyCnnSpec::load_json(data_path("toy/model.json"));
  Gen gen(403);
  for (int i = 0; i < 30; ++i) {
    ForwardResult r = toy_forward(spec, random_image(gen, 8, 8));
    EXPECT_NEAR(r.probabilities.sum(), 1.0, 1e-12);
    EXPECT_GE(r.probabilities.minCoeff(), 0.0);
    Vector shifted = (r.logits.array() - r.logits.maxCoeff()).exp();
    EXPECT_LT((shifted / shifted.sum() - r.probabilities).cwiseAbs().maxCoeff(),
              1e-15);
  }
}

TEST(ToyCnn, ForwardIsDeterministic) {
  ToyCnnSpec spec = ToyCnnSpec::load_json(data_path("toy/model.json"));
  Gen gen(404);
  Image img = random_image(gen, 8, 8);
  EXPECT_TRUE(bit_equal(toy_forward(spec, img).probabilities,
                        toy_forward(spec, img).probabilities));
}

}  // namespace
}  // namespace ccam
