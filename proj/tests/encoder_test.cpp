// Copyright 2026 The angmetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "angmetric/encoder.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "angmetric/error.hpp"
#include "angmetric/losses.hpp"
#include "test_util.hpp"

namespace angmetric {
namespace {

EncoderSpec make_spec(EncoderKind kind, std::size_t in, std::size_t out,
                      bool normalize, std::size_t hidden = 0) {
  EncoderSpec s;
  s.kind = kind;
  s.input_dim = in;
  s.embed_dim = out;
  s.hidden_dim = hidden;
  s.normalize_output = normalize;
  return s;
}

std::vector<Vector> random_inputs(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::gaussian_vector(rng, dim));
  return out;
}

TEST(L2Normalize, Examples) {
  const Vector y = l2_normalize(Vector{3, 4});
  EXPECT_DOUBLE_EQ(y[0], 0.6);
  EXPECT_DOUBLE_EQ(y[1], 0.8);
  const Vector u{0.6, 0.8};
  EXPECT_EQ(l2_normalize(u), u);
  EXPECT_THROW(l2_normalize(Vector{0, 0}), NumericalError);
  EXPECT_THROW(l2_normalize(Vector{INFINITY, 0}), NumericalError);
}

TEST(EncoderSpec, KindNames) {
  for (auto k : {EncoderKind::kIdentity, EncoderKind::kLinear, EncoderKind::kMlp}) {
    EXPECT_EQ(parse_encoder_kind(encoder_kind_name(k)), k);
  }
  EXPECT_FALSE(parse_encoder_kind("cnn").has_value());
}

TEST(EncoderModel, ShapeValidation) {
  EXPECT_THROW(EncoderModel(make_spec(EncoderKind::kIdentity, 3, 4, false)), InvalidInput);
  EXPECT_THROW(EncoderModel(make_spec(EncoderKind::kMlp, 3, 4, false, 0)), InvalidInput);
  EXPECT_THROW(EncoderModel(make_spec(EncoderKind::kLinear, 0, 4, false)), InvalidInput);
  EncoderModel m(make_spec(EncoderKind::kMlp, 3, 2, false, 5));
  EXPECT_EQ(m.num_parameters(), 5u * 3 + 5 + 2u * 5 + 2);
  EXPECT_EQ(EncoderModel(make_spec(EncoderKind::kIdentity, 3, 3, false)).num_parameters(),
            0u);
  std::vector<DenseLayer> wrong(2);
  wrong[0].weight = Matrix(5, 4);
  wrong[0].bias.assign(5, 0.0);
  wrong[1].weight = Matrix(2, 5);
  wrong[1].bias.assign(2, 0.0);
  EXPECT_THROW(m.set_layers(wrong), InvalidInput);
}

TEST(EncoderForward, IdentityKindPassesInputsThrough) {
  std::mt19937_64 rng(1);
  const auto x = random_inputs(rng, 5, 4);
  const EncoderModel m(make_spec(EncoderKind::kIdentity, 4, 4, false));
  EXPECT_EQ(encode(m, x), x);
  EXPECT_THROW(encode(m, std::vector<Vector>{{1, 2, 3}}), InvalidInput);
}

TEST(EncoderForward, LinearWithIdentityWeightPassesInputsThrough) {
  std::mt19937_64 rng(2);
  const auto x = random_inputs(rng, 5, 3);
  EncoderModel m(make_spec(EncoderKind::kLinear, 3, 3, false));
  m.set_layers({DenseLayer{Matrix::identity(3), Vector(3, 0.0)}});
  EXPECT_EQ(encode(m, x), x);
}

TEST(EncoderForward, NormalizedOutputsHaveUnitNorm) {
  std::mt19937_64 rng(3);
  for (auto kind : {EncoderKind::kIdentity, EncoderKind::kLinear, EncoderKind::kMlp}) {
    const std::size_t out = kind == EncoderKind::kIdentity ? 6 : 4;
    const EncoderModel m =
        EncoderModel::initialized(make_spec(kind, 6, out, true, 7), 5);
    for (const Vector& y : encode(m, random_inputs(rng, 40, 6))) {
      EXPECT_NEAR(norm(y), 1.0, 1e-12);
    }
  }
}

TEST(EncoderForward, ZeroRawVectorStaysZero) {
  EncoderModel m(make_spec(EncoderKind::kLinear, 2, 2, true));
  const auto y = encode(m, std::vector<Vector>{{1, 2}});
  EXPECT_EQ(y[0], (Vector{0, 0}));
}

TEST(EncoderModel, InitializationIsSeededAndBounded) {
  const EncoderSpec s = make_spec(EncoderKind::kMlp, 9, 3, false, 4);
  const EncoderModel a = EncoderModel::initialized(s, 42);
  EXPECT_EQ(a.flat_parameters(), EncoderModel::initialized(s, 42).flat_parameters());
  EXPECT_NE(a.flat_parameters(), EncoderModel::initialized(s, 43).flat_parameters());
  for (double w : a.layers()[0].weight.data) EXPECT_LE(std::abs(w), 1.0 / 3.0);
  for (double w : a.layers()[1].weight.data) EXPECT_LE(std::abs(w), 0.5);
}

TEST(EncoderBackward, LinearSingleSampleIsOuterProduct) {
  EncoderModel m = EncoderModel::initialized(make_spec(EncoderKind::kLinear, 3, 2, false), 7);
  const std::vector<Vector> x{{1.5, -2.0, 0.5}};
  const std::vector<Vector> g{{0.25, -3.0}};
  const ForwardResult f = encoder_forward(m, x);
  const EncoderGradients grads = encoder_backward(m, f.cache, g);
  const Matrix& dw = grads.layers[0].weight;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(dw(r, c), g[0][r] * x[0][c]);
  }
  EXPECT_EQ(grads.layers[0].bias, g[0]);
}

TEST(EncoderBackward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(5);
  for (bool normalize : {false, true}) {
    const EncoderModel m =
        EncoderModel::initialized(make_spec(EncoderKind::kMlp, 4, 3, normalize, 6), 9);
    const auto x = random_inputs(rng, 5, 4);
    const ForwardResult f = encoder_forward(m, x);
    const auto grads =
        encoder_backward(m, f.cache, std::vector<Vector>(5, Vector(3, 0.0)));
    for (const auto& layer : grads.layers) {
      for (double v : layer.weight.data) EXPECT_EQ(v, 0.0);
      for (double v : layer.bias) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(EncoderBackward, StaleOrMismatchedCacheIsRejected) {
  std::mt19937_64 rng(6);
  EncoderModel m = EncoderModel::initialized(make_spec(EncoderKind::kLinear, 3, 2, false), 1);
  const auto x = random_inputs(rng, 4, 3);
  const ForwardResult f = encoder_forward(m, x);
  const std::vector<Vector> g(4, Vector{1.0, 1.0});
  EXPECT_NO_THROW(encoder_backward(m, f.cache, g));
  EXPECT_THROW(encoder_backward(m, f.cache, std::vector<Vector>(3, Vector{1.0, 1.0})),
               InvalidInput);
  EXPECT_THROW(encoder_backward(m, f.cache, std::vector<Vector>(4, Vector{1.0})),
               InvalidInput);
  const EncoderModel other =
      EncoderModel::initialized(make_spec(EncoderKind::kLinear, 3, 2, false), 1);
  EXPECT_THROW(encoder_backward(other, f.cache, g), InvalidInput);
  m.apply_gradient(encoder_backward(m, f.cache, g).layers, 0.1);
  EXPECT_THROW(encoder_backward(m, f.cache, g), InvalidInput);
}

TEST(EncoderModel, FlatParametersRoundTrip) {
  EncoderModel m = EncoderModel::initialized(make_spec(EncoderKind::kMlp, 3, 2, true, 4), 2);
  Vector p = m.flat_parameters();
  ASSERT_EQ(p.size(), m.num_parameters());
  for (double& v : p) v *= 2.0;
  m.set_flat_parameters(p);
  EXPECT_EQ(m.flat_parameters(), p);
  EXPECT_THROW(m.set_flat_parameters(Vector(3, 0.0)), InvalidInput);
}

TEST(EncoderModel, ApplyGradientIsPlainDescent) {
  EncoderModel m = EncoderModel::initialized(make_spec(EncoderKind::kLinear, 2, 2, false), 4);
  const Vector before = m.flat_parameters();
  std::vector<DenseLayer> g{DenseLayer{Matrix(2, 2), Vector{1.0, -2.0}}};
  g[0].weight(0, 1) = 4.0;
  m.apply_gradient(g, 0.5);
  Vector expected = before;
  expected[1] -= 2.0;  // weight(0,1)
  expected[4] -= 0.5;  // bias[0]
  expected[5] += 1.0;  // bias[1]
  EXPECT_EQ(m.flat_parameters(), expected);
}

// Scalar probe: sum_i <w_i, f(x_i)> for fixed random w_i, so the upstream
// gradient is w and the whole Jacobian gets exercised.
TEST(EncoderBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto kind = static_cast<EncoderKind>(trial % 3);
    const bool normalize = (trial / 3) % 2 == 1;
    const std::size_t in = 4;
    const std::size_t out = kind == EncoderKind::kIdentity ? 4 : 3;
    const EncoderModel base =
        EncoderModel::initialized(make_spec(kind, in, out, normalize, 5), trial);
    const auto x = random_inputs(rng, 3, in);
    const auto w = random_inputs(rng, 3, out);
    const ForwardResult f = encoder_forward(base, x);
    bool near_relu_kink = false;
    for (const auto& h : f.cache.hidden_pre) {
      for (double v : h) near_relu_kink = near_relu_kink || std::abs(v) < 1e-3;
    }
    if (near_relu_kink) continue;
    const EncoderGradients g = encoder_backward(base, f.cache, w);

    auto probe = [&](const EncoderModel& m, const std::vector<Vector>& inputs) {
      double s = 0.0;
      const auto y = encode(m, inputs);
      for (std::size_t i = 0; i < y.size(); ++i) s += dot(w[i], y[i]);
      return s;
    };
    const auto input_numeric = finite_difference_gradient(
        [&](const std::vector<Vector>& in_x) { return probe(base, in_x); }, x, 1e-6);
    EXPECT_LT(gradient_relative_error(g.inputs, input_numeric), 1e-6) << trial;

    if (base.num_parameters() > 0) {
      EncoderModel scratch = base;
      const auto param_numeric = finite_difference_gradient(
          [&](const std::vector<Vector>& p) {
            scratch.set_flat_parameters(p[0]);
            return probe(scratch, x);
          },
          {base.flat_parameters()}, 1e-6);
      Vector analytic;
      for (const auto& l : g.layers) {
        analytic.insert(analytic.end(), l.weight.data.begin(), l.weight.data.end());
        analytic.insert(analytic.end(), l.bias.begin(), l.bias.end());
      }
      EXPECT_LT(gradient_relative_error(std::vector<Vector>{analytic}, param_numeric), 1e-6)
          << trial;
    }
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

}  // namespace
}  // namespace angmetric
