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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "angmetric/vector_ops.hpp"

namespace angmetric {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

  static Matrix identity(std::size_t n);
};

/// y = weight * x + bias; weight is (out x in).
struct DenseLayer {
  Matrix weight;
  Vector bias;
};

enum class EncoderKind { kIdentity, kLinear, kMlp };

std::optional<EncoderKind> parse_encoder_kind(std::string_view name);
std::string_view encoder_kind_name(EncoderKind kind);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::kLinear;
  std::size_t input_dim = 0;
  std::size_t embed_dim = 16;
  /// Only used by kMlp.
  std::size_t hidden_dim = 0;
  bool normalize_output = false;
};

/// Trainable map from input features to embeddings: identity, one affine
/// layer, or affine -> ReLU -> affine, optionally followed by L2
/// normalization.
class EncoderModel {
 public:
  /// Zero-initialised parameters.
  explicit EncoderModel(const EncoderSpec& spec);

  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static EncoderModel initialized(const EncoderSpec& spec, std::uint64_t seed);

  const EncoderSpec& spec() const { return spec_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Replaces all layers; shapes must match the spec.
  void set_layers(std::vector<DenseLayer> layers);

  std::size_t num_parameters() const;
  /// Parameters flattened layer by layer: weight rows, then bias.
  Vector flat_parameters() const;
  void set_flat_parameters(ConstSpan values);

  /// parameters -= learning_rate * gradient
  void apply_gradient(const std::vector<DenseLayer>& gradient,
                      double learning_rate);

  /// Changes whenever the parameters change; forward caches record it.
  std::uint64_t state_id() const { return state_id_; }

 private:
  void touch();

  EncoderSpec spec_;
  std::vector<DenseLayer> layers_;
  std::uint64_t state_id_ = 0;
};

/// Intermediates kept by encoder_forward for the matching backward call.
struct ForwardCache {
  std::uint64_t state_id = 0;
  std::vector<Vector> inputs;
  std::vector<Vector> hidden_pre;  // mlp only, before ReLU
  std::vector<Vector> hidden;      // mlp only, after ReLU
  std::vector<Vector> raw;         // before normalization
  std::vector<double> raw_norms;   // normalize_output only
};

struct ForwardResult {
  std::vector<Vector> embeddings;
  ForwardCache cache;
};

struct EncoderGradients {
  std::vector<DenseLayer> layers;
  std::vector<Vector> inputs;
};

/// x / |x|; throws NumericalError for a zero (or non-finite) vector.
Vector l2_normalize(ConstSpan x);

ForwardResult encoder_forward(const EncoderModel& model,
                              std::span<const Vector> inputs);

/// Embeddings only.
std::vector<Vector> encode(const EncoderModel& model,
                           std::span<const Vector> inputs);

/// Exact chain rule through the layers and the normalization Jacobian.
/// Throws InvalidInput when the cache was produced by a different
/// parameter state or batch shape.
EncoderGradients encoder_backward(const EncoderModel& model,
                                  const ForwardCache& cache,
                                  std::span<const Vector> grad_embeddings);

}  // namespace angmetric
