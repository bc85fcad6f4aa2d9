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

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "angmetric/dataset.hpp"
#include "angmetric/encoder.hpp"
#include "angmetric/losses.hpp"
#include "angmetric/sampling.hpp"

namespace angmetric {

enum class LossKind {
  kTripletDisjoint,  // triplet hinge, disjoint triplets
  kTripletNPair,     // triplet hinge, N-pair sampling
  kAngular,          // batch log-sum-exp angular loss
  kNPair,
  kNPairAngular,     // npair + lambda * angular
};

/// Accepts "triplet" (alias "triplet-disjoint"), "triplet-npair",
/// "angular", "npair", "npair-angular".
std::optional<LossKind> parse_loss_kind(std::string_view name);
std::string_view loss_kind_name(LossKind kind);
bool uses_npair_sampling(LossKind kind);
bool uses_alpha(LossKind kind);

struct TrainConfig {
  LossKind loss = LossKind::kNPairAngular;
  double alpha_degrees = 45.0;
  double margin = kDefaultMargin;
  double lambda = kDefaultLambda;
  std::size_t batch_size = 32;
  std::size_t iterations = 2000;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  /// input_dim of 0 is filled in from the training data.
  EncoderSpec encoder{};
};

/// Throws InvalidInput on an inconsistent configuration.
void validate_config(const TrainConfig& config);

/// Raw inputs of one iteration. Rows are grouped (a, p, n) for disjoint
/// triplets and laid out [a0, p0, a1, p1, ...] for N-pair batches.
struct MiniBatch {
  std::vector<Vector> inputs;
  std::vector<Label> labels;
  bool disjoint_triplets = false;
};

MiniBatch draw_minibatch(Sampler& sampler, const LabeledDataset& data,
                         const TrainConfig& config);

/// The configured loss evaluated on already-embedded minibatch rows.
LossResult loss_on_embeddings(const TrainConfig& config, const MiniBatch& batch,
                              const std::vector<Vector>& embeddings);

struct ObjectiveResult {
  double value = 0.0;
  std::vector<DenseLayer> parameter_gradients;
};

/// loss(encoder(batch)) and its gradient with respect to the parameters.
ObjectiveResult evaluate_objective(const EncoderModel& model,
                                   const TrainConfig& config,
                                   const MiniBatch& batch);

struct TrainResult {
  EncoderModel model;
  std::vector<double> history;
};

/// Plain gradient descent: sample, forward, loss, backward, update. The
/// recorded loss is the one evaluated before each update. Throws
/// NumericalError naming the iteration when the loss stops being finite.
TrainResult train(const LabeledDataset& data, const TrainConfig& config);

/// Extra class-independent noise on the last `dims` coordinates. It is
/// shared by every class, so an encoder trained on some classes can learn
/// to suppress it for unseen ones.
struct NuisanceNoise {
  std::size_t dims = 0;
  double sigma = 0.0;
};

/// K class centres ~ N(0, center_scale^2 I), then per_class samples at
/// centre + N(0, noise_sigma^2 I) (+ nuisance noise when requested). Rows
/// are class-major, labels 0..K-1.
LabeledDataset generate_synthetic(std::size_t classes, std::size_t per_class,
                                  std::size_t dim, double center_scale,
                                  double noise_sigma, std::uint64_t seed,
                                  const NuisanceNoise& nuisance = {});

}  // namespace angmetric
