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

#include <cmath>
#include <sstream>

namespace angmetric {
namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSamplerStream = 1;

}  // namespace

std::optional<LossKind> parse_loss_kind(std::string_view name) {
  if (name == "triplet" || name == "triplet-disjoint") {
    return LossKind::kTripletDisjoint;
  }
  if (name == "triplet-npair") return LossKind::kTripletNPair;
  if (name == "angular") return LossKind::kAngular;
  if (name == "npair") return LossKind::kNPair;
  if (name == "npair-angular") return LossKind::kNPairAngular;
  return std::nullopt;
}

std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kTripletDisjoint:
      return "triplet";
    case LossKind::kTripletNPair:
      return "triplet-npair";
    case LossKind::kAngular:
      return "angular";
    case LossKind::kNPair:
      return "npair";
    case LossKind::kNPairAngular:
      return "npair-angular";
  }
  return "unknown";
}

bool uses_npair_sampling(LossKind kind) {
  return kind != LossKind::kTripletDisjoint;
}

bool uses_alpha(LossKind kind) {
  return kind == LossKind::kAngular || kind == LossKind::kNPairAngular;
}

void validate_config(const TrainConfig& config) {
  if (config.iterations < 1) throw InvalidInput("iterations must be >= 1");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw InvalidInput("learning rate must be positive and finite");
  }
  if (uses_npair_sampling(config.loss)) {
    if (config.batch_size < 4 || config.batch_size % 2 != 0) {
      throw InvalidInput("N-pair sampled losses need an even batch size >= 4");
    }
  } else if (config.batch_size < 3) {
    throw InvalidInput("disjoint triplet batches need batch size >= 3");
  }
  if (uses_alpha(config.loss)) check_alpha_degrees(config.alpha_degrees);
  if (!(config.margin >= 0.0) || !std::isfinite(config.margin)) {
    throw InvalidInput("margin must be finite and >= 0");
  }
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw InvalidInput("lambda must be finite and >= 0");
  }
}

MiniBatch draw_minibatch(Sampler& sampler, const LabeledDataset& data,
                         const TrainConfig& config) {
  MiniBatch batch;
  if (config.loss == LossKind::kTripletDisjoint) {
    batch.disjoint_triplets = true;
    for (const auto& t : sampler.disjoint_triplets(config.batch_size / 3)) {
      for (std::size_t pos : t) {
        batch.inputs.push_back(data.sample(pos));
        batch.labels.push_back(data.label(pos));
      }
    }
  } else {
    NPairBatch b = sampler.npair_batch(config.batch_size);
    batch.inputs = std::move(b.vectors);
    batch.labels = std::move(b.labels);
  }
  return batch;
}

LossResult loss_on_embeddings(const TrainConfig& config, const MiniBatch& batch,
                              const std::vector<Vector>& embeddings) {
  if (embeddings.size() != batch.labels.size()) {
    throw InvalidInput("loss_on_embeddings: row count mismatch");
  }
  if (batch.disjoint_triplets) {
    std::vector<Triplet> triplets;
    for (std::size_t i = 0; i + 2 < embeddings.size(); i += 3) {
      triplets.emplace_back(embeddings[i], embeddings[i + 1],
                            embeddings[i + 2]);
    }
    return triplet_loss_mean(triplets, config.margin);
  }
  const NPairBatch b = NPairBatch::from_pairs(embeddings, batch.labels);
  switch (config.loss) {
    case LossKind::kTripletNPair:
      return triplet_loss_npair_batch(b, config.margin);
    case LossKind::kAngular:
      return angular_loss_batch(b, AngularParams(config.alpha_degrees));
    case LossKind::kNPair:
      return npair_loss_batch(b);
    case LossKind::kNPairAngular:
      return combined_loss_batch(b, AngularParams(config.alpha_degrees),
                                 config.lambda);
    case LossKind::kTripletDisjoint:
      break;
  }
  throw InvalidInput("loss_on_embeddings: triplet loss needs a triplet batch");
}

ObjectiveResult evaluate_objective(const EncoderModel& model,
                                   const TrainConfig& config,
                                   const MiniBatch& batch) {
  const ForwardResult fwd = encoder_forward(model, batch.inputs);
  const LossResult loss = loss_on_embeddings(config, batch, fwd.embeddings);
  ObjectiveResult out;
  out.value = loss.value;
  out.parameter_gradients =
      encoder_backward(model, fwd.cache, loss.gradients).layers;
  return out;
}

TrainResult train(const LabeledDataset& data, const TrainConfig& config) {
  validate_config(config);
  if (data.empty()) throw InvalidInput("train: empty dataset");
  EncoderSpec spec = config.encoder;
  if (spec.input_dim == 0) spec.input_dim = data.dim();
  if (spec.input_dim != data.dim()) {
    throw InvalidInput("train: encoder input_dim " +
                       std::to_string(spec.input_dim) +
                       " does not match data dimension " +
                       std::to_string(data.dim()));
  }
  TrainResult result{
      EncoderModel::initialized(spec, mix_seed(config.seed, kInitStream)),
      {}};
  Sampler sampler(data, mix_seed(config.seed, kSamplerStream));
  result.history.reserve(config.iterations);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const MiniBatch batch = draw_minibatch(sampler, data, config);
    const ObjectiveResult obj = evaluate_objective(result.model, config, batch);
    if (!std::isfinite(obj.value)) {
      std::ostringstream msg;
      msg << "training diverged at iteration " << it + 1
          << ": loss is not finite (" << obj.value << ")";
      throw NumericalError(msg.str());
    }
    result.history.push_back(obj.value);
    result.model.apply_gradient(obj.parameter_gradients, config.learning_rate);
  }
  return result;
}

LabeledDataset generate_synthetic(std::size_t classes, std::size_t per_class,
                                  std::size_t dim, double center_scale,
                                  double noise_sigma, std::uint64_t seed,
                                  const NuisanceNoise& nuisance) {
  if (classes < 2 || per_class < 2 || dim < 2) {
    throw InvalidInput("generate_synthetic: classes, per_class and dim must be >= 2");
  }
  if (!(center_scale > 0.0) || !std::isfinite(center_scale)) {
    throw InvalidInput("generate_synthetic: center_scale must be positive");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidInput("generate_synthetic: noise_sigma must be >= 0");
  }
  if (nuisance.dims > dim) {
    throw InvalidInput("generate_synthetic: nuisance dims exceed dim");
  }
  if (!(nuisance.sigma >= 0.0) || !std::isfinite(nuisance.sigma)) {
    throw InvalidInput("generate_synthetic: nuisance sigma must be >= 0");
  }
  Rng rng(seed);
  std::vector<Vector> centers(classes, Vector(dim));
  for (auto& c : centers) {
    for (double& v : c) v = center_scale * rng.normal();
  }
  std::vector<Vector> samples;
  std::vector<Label> labels;
  samples.reserve(classes * per_class);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t m = 0; m < per_class; ++m) {
      Vector x = centers[k];
      for (double& v : x) v += noise_sigma * rng.normal();
      for (std::size_t d = dim - nuisance.dims; d < dim; ++d) {
        x[d] += nuisance.sigma * rng.normal();
      }
      samples.push_back(std::move(x));
      labels.push_back(static_cast<Label>(k));
    }
  }
  return LabeledDataset(std::move(samples), std::move(labels));
}

}  // namespace angmetric
