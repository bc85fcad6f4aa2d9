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

#include "angmetric/training.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "angmetric/error.hpp"
#include "angmetric/evaluation.hpp"
#include "angmetric/geometry.hpp"

namespace angmetric {
namespace {

constexpr LossKind kAllLosses[] = {LossKind::kTripletDisjoint, LossKind::kTripletNPair,
                                   LossKind::kAngular, LossKind::kNPair,
                                   LossKind::kNPairAngular};

TrainConfig small_config(LossKind loss, EncoderKind kind, bool normalize) {
  TrainConfig c;
  c.loss = loss;
  c.alpha_degrees = 40.0;
  c.margin = 0.3;
  c.batch_size = loss == LossKind::kTripletDisjoint ? 9 : 6;
  c.iterations = 20;
  c.learning_rate = 0.05;
  c.seed = 5;
  c.encoder.kind = kind;
  c.encoder.input_dim = 5;
  c.encoder.embed_dim = kind == EncoderKind::kIdentity ? 5 : 3;
  c.encoder.hidden_dim = 4;
  c.encoder.normalize_output = normalize;
  return c;
}

Vector flatten(const std::vector<DenseLayer>& layers) {
  Vector out;
  for (const auto& l : layers) {
    out.insert(out.end(), l.weight.data.begin(), l.weight.data.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

// True when some hinge in the objective sits within `band` of its kink.
bool near_hinge_kink(const TrainConfig& config, const MiniBatch& batch,
                     const std::vector<Vector>& emb, double band) {
  if (config.loss == LossKind::kTripletDisjoint) {
    for (std::size_t i = 0; i + 2 < emb.size(); i += 3) {
      const Triplet t(emb[i], emb[i + 1], emb[i + 2]);
      if (std::abs(triplet_hinge_argument(t, config.margin)) < band) return true;
    }
  } else if (config.loss == LossKind::kTripletNPair) {
    for (std::size_t i = 0; i < emb.size(); ++i) {
      for (std::size_t j = 0; j < emb.size(); ++j) {
        if (batch.labels[j] == batch.labels[i]) continue;
        const Triplet t(emb[i], emb[i ^ 1], emb[j]);
        if (std::abs(triplet_hinge_argument(t, config.margin)) < band) return true;
      }
    }
  }
  return false;
}

TEST(LossKindNames, RoundTripAndAliases) {
  for (LossKind k : kAllLosses) EXPECT_EQ(parse_loss_kind(loss_kind_name(k)), k);
  EXPECT_EQ(parse_loss_kind("triplet"), LossKind::kTripletDisjoint);
  EXPECT_FALSE(parse_loss_kind("contrastive").has_value());
  EXPECT_TRUE(uses_alpha(LossKind::kAngular));
  EXPECT_TRUE(uses_alpha(LossKind::kNPairAngular));
  EXPECT_FALSE(uses_alpha(LossKind::kNPair));
  EXPECT_FALSE(uses_npair_sampling(LossKind::kTripletDisjoint));
  EXPECT_TRUE(uses_npair_sampling(LossKind::kTripletNPair));
}

TEST(ValidateConfig, RejectsBadSettings) {
  TrainConfig c;
  EXPECT_NO_THROW(validate_config(c));
  c.iterations = 0;
  EXPECT_THROW(validate_config(c), InvalidInput);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(validate_config(c), InvalidInput);
  c = TrainConfig{};
  c.batch_size = 7;
  EXPECT_THROW(validate_config(c), InvalidInput);
  c.batch_size = 2;
  EXPECT_THROW(validate_config(c), InvalidInput);
  c = TrainConfig{};
  c.loss = LossKind::kTripletDisjoint;
  c.batch_size = 7;
  EXPECT_NO_THROW(validate_config(c));
  c.batch_size = 2;
  EXPECT_THROW(validate_config(c), InvalidInput);
  c = TrainConfig{};
  c.alpha_degrees = 90.0;
  EXPECT_THROW(validate_config(c), InvalidInput);
  c = TrainConfig{};
  c.lambda = -1.0;
  EXPECT_THROW(validate_config(c), InvalidInput);
}

TEST(DrawMinibatch, DisjointTripletsUseFloorOfBatchOverThree) {
  const LabeledDataset data = generate_synthetic(4, 5, 3, 1.0, 0.1, 1);
  TrainConfig c;
  c.loss = LossKind::kTripletDisjoint;
  c.batch_size = 30;
  Sampler s(data, 1);
  const MiniBatch b = draw_minibatch(s, data, c);
  EXPECT_TRUE(b.disjoint_triplets);
  EXPECT_EQ(b.inputs.size(), 30u);
  c.batch_size = 32;
  EXPECT_EQ(draw_minibatch(s, data, c).inputs.size(), 30u);
  for (std::size_t i = 0; i < b.labels.size(); i += 3) {
    EXPECT_EQ(b.labels[i], b.labels[i + 1]);
    EXPECT_NE(b.labels[i], b.labels[i + 2]);
  }
}

TEST(EvaluateObjective, MatchesFiniteDifferencesOnParameters) {
  const LabeledDataset data = generate_synthetic(6, 4, 5, 1.0, 0.5, 17);
  int checked = 0;
  int skipped = 0;
  for (int cfg = 0; cfg < 100; ++cfg) {
    const LossKind loss = kAllLosses[cfg % 5];
    const auto kind = (cfg / 5) % 2 == 0 ? EncoderKind::kLinear : EncoderKind::kMlp;
    const bool normalize = (cfg / 10) % 2 == 1;
    TrainConfig c = small_config(loss, kind, normalize);
    c.alpha_degrees = 20.0 + 2.0 * (cfg % 20);
    c.margin = 0.05 * (cfg % 10);
    const EncoderModel model = EncoderModel::initialized(c.encoder, 100 + cfg);
    Sampler sampler(data, 200 + cfg);
    const MiniBatch batch = draw_minibatch(sampler, data, c);

    const ForwardResult fwd = encoder_forward(model, batch.inputs);
    bool relu_kink = false;
    for (const auto& h : fwd.cache.hidden_pre) {
      for (double v : h) relu_kink = relu_kink || std::abs(v) < 1e-3;
    }
    if (relu_kink || near_hinge_kink(c, batch, fwd.embeddings, 1e-3)) {
      ++skipped;
      continue;
    }

    const ObjectiveResult obj = evaluate_objective(model, c, batch);
    EncoderModel scratch = model;
    const auto numeric = finite_difference_gradient(
        [&](const std::vector<Vector>& p) {
          scratch.set_flat_parameters(p[0]);
          return loss_on_embeddings(c, batch, encode(scratch, batch.inputs)).value;
        },
        {model.flat_parameters()}, 1e-5);
    const double err = gradient_relative_error(
        std::vector<Vector>{flatten(obj.parameter_gradients)}, numeric);
    EXPECT_LT(err, 1e-4) << loss_kind_name(loss) << " cfg " << cfg;
    ++checked;
  }
  EXPECT_GE(checked, 80) << "skipped " << skipped;
}

TEST(Train, IdenticalSeedsGiveIdenticalHistory) {
  const LabeledDataset data = generate_synthetic(6, 5, 5, 1.0, 0.3, 2);
  for (LossKind loss : kAllLosses) {
    const TrainConfig c = small_config(loss, EncoderKind::kMlp, true);
    const TrainResult a = train(data, c);
    const TrainResult b = train(data, c);
    ASSERT_EQ(a.history.size(), 20u);
    EXPECT_EQ(a.history, b.history);
    EXPECT_EQ(a.model.flat_parameters(), b.model.flat_parameters());
    TrainConfig other = c;
    other.seed = 6;
    EXPECT_NE(train(data, other).history, a.history);
  }
}

TEST(Train, SingleIterationIsOneUpdate) {
  const LabeledDataset data = generate_synthetic(4, 4, 5, 1.0, 0.3, 2);
  TrainConfig c = small_config(LossKind::kNPairAngular, EncoderKind::kLinear, false);
  c.iterations = 1;
  const TrainResult r = train(data, c);
  ASSERT_EQ(r.history.size(), 1u);

  EncoderModel expected = EncoderModel::initialized(c.encoder, mix_seed(c.seed, 0));
  Sampler sampler(data, mix_seed(c.seed, 1));
  const MiniBatch batch = draw_minibatch(sampler, data, c);
  const ObjectiveResult obj = evaluate_objective(expected, c, batch);
  EXPECT_EQ(r.history[0], obj.value);
  expected.apply_gradient(obj.parameter_gradients, c.learning_rate);
  EXPECT_EQ(r.model.flat_parameters(), expected.flat_parameters());
}

TEST(Train, InputDimensionMismatchIsRejected) {
  const LabeledDataset data = generate_synthetic(4, 4, 5, 1.0, 0.3, 2);
  TrainConfig c = small_config(LossKind::kNPair, EncoderKind::kLinear, false);
  c.encoder.input_dim = 4;
  EXPECT_THROW(train(data, c), InvalidInput);
  c.encoder.input_dim = 0;
  EXPECT_NO_THROW(train(data, c));
}

TEST(Train, TooFewClassesForBatchIsSamplingError) {
  const LabeledDataset data = generate_synthetic(3, 4, 5, 1.0, 0.3, 2);
  TrainConfig c = small_config(LossKind::kNPair, EncoderKind::kLinear, false);
  c.batch_size = 8;
  EXPECT_THROW(train(data, c), SamplingError);
}

TEST(Train, DivergenceIsReported) {
  const LabeledDataset data = generate_synthetic(4, 4, 5, 10.0, 1.0, 2);
  TrainConfig c = small_config(LossKind::kNPairAngular, EncoderKind::kLinear, false);
  c.learning_rate = 10.0;
  c.iterations = 200;
  try {
    train(data, c);
    FAIL() << "expected divergence";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(Train, AngularLossDropsOnSeparatedData) {
  const LabeledDataset data = generate_synthetic(10, 20, 16, 1.0, 0.1, 3);
  TrainConfig c;
  c.loss = LossKind::kAngular;
  c.alpha_degrees = 45.0;
  c.batch_size = 16;
  c.iterations = 2000;
  c.learning_rate = 0.01;
  c.seed = 1;
  c.encoder.kind = EncoderKind::kLinear;
  c.encoder.embed_dim = 16;
  const TrainResult r = train(data, c);
  const double tail =
      std::accumulate(r.history.end() - 100, r.history.end(), 0.0) / 100.0;
  EXPECT_LT(tail, 0.1 * r.history.front());
}

TEST(GenerateSynthetic, CountsAndLabels) {
  const LabeledDataset d = generate_synthetic(7, 3, 4, 1.0, 0.2, 9);
  EXPECT_EQ(d.size(), 21u);
  EXPECT_EQ(d.dim(), 4u);
  EXPECT_EQ(d.num_classes(), 7u);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.label(i), static_cast<Label>(i / 3));
}

TEST(GenerateSynthetic, ZeroNoiseGivesDuplicates) {
  const LabeledDataset d = generate_synthetic(2, 2, 3, 1.0, 0.0, 4);
  EXPECT_EQ(d.sample(0), d.sample(1));
  EXPECT_EQ(d.sample(2), d.sample(3));
  EXPECT_NE(d.sample(0), d.sample(2));
}

TEST(GenerateSynthetic, DeterministicPerSeed) {
  const auto a = generate_synthetic(3, 4, 5, 2.0, 0.5, 8);
  const auto b = generate_synthetic(3, 4, 5, 2.0, 0.5, 8);
  EXPECT_EQ(a.samples(), b.samples());
  EXPECT_NE(a.samples(), generate_synthetic(3, 4, 5, 2.0, 0.5, 9).samples());
}

TEST(GenerateSynthetic, NuisanceNoiseTouchesOnlyTrailingDims) {
  const auto plain = generate_synthetic(2, 3, 6, 1.0, 0.0, 8);
  const auto noisy = generate_synthetic(2, 3, 6, 1.0, 0.0, 8, NuisanceNoise{2, 1.0});
  for (std::size_t i = 0; i < plain.size(); ++i) {
    for (std::size_t d = 0; d < 4; ++d) EXPECT_EQ(plain.sample(i)[d], noisy.sample(i)[d]);
    EXPECT_NE(plain.sample(i)[5], noisy.sample(i)[5]);
  }
}

TEST(GenerateSynthetic, Errors) {
  EXPECT_THROW(generate_synthetic(1, 3, 3, 1.0, 0.1, 0), InvalidInput);
  EXPECT_THROW(generate_synthetic(3, 1, 3, 1.0, 0.1, 0), InvalidInput);
  EXPECT_THROW(generate_synthetic(3, 3, 1, 1.0, 0.1, 0), InvalidInput);
  EXPECT_THROW(generate_synthetic(3, 3, 3, 0.0, 0.1, 0), InvalidInput);
  EXPECT_THROW(generate_synthetic(3, 3, 3, 1.0, -0.1, 0), InvalidInput);
  EXPECT_THROW(generate_synthetic(3, 3, 3, 1.0, 0.1, 0, NuisanceNoise{4, 1.0}),
               InvalidInput);
}

TEST(GenerateSynthetic, LowNoiseClustersRecoverPartition) {
  const LabeledDataset d = generate_synthetic(8, 10, 12, 1.0, 0.01, 21);
  const KMeansResult km = kmeans(d.samples(), 8, 3);
  EXPECT_DOUBLE_EQ(nmi(km.assignments, d.labels()), 1.0);
}

}  // namespace
}  // namespace angmetric
