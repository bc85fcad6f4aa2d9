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

#include <algorithm>
#include <atomic>
#include <cmath>

#include "angmetric/rng.hpp"

namespace angmetric {
namespace {

std::atomic<std::uint64_t> g_next_state_id{1};

Vector affine(const DenseLayer& layer, ConstSpan x) {
  Vector y = layer.bias;
  for (std::size_t r = 0; r < layer.weight.rows; ++r) {
    y[r] += dot(layer.weight.row(r), x);
  }
  return y;
}

// Accumulates grad_out * x^T into the weight gradient and grad_out into the
// bias gradient; returns weight^T * grad_out.
Vector affine_backward(const DenseLayer& layer, ConstSpan x, ConstSpan grad_out,
                       DenseLayer& grad) {
  Vector grad_in(layer.weight.cols, 0.0);
  for (std::size_t r = 0; r < layer.weight.rows; ++r) {
    const double g = grad_out[r];
    grad.bias[r] += g;
    axpy(g, x, grad.weight.row(r));
    axpy(g, layer.weight.row(r), grad_in);
  }
  return grad_in;
}

std::vector<DenseLayer> zero_layers_like(const std::vector<DenseLayer>& ls) {
  std::vector<DenseLayer> out;
  for (const auto& l : ls) {
    out.push_back({Matrix(l.weight.rows, l.weight.cols),
                   Vector(l.bias.size(), 0.0)});
  }
  return out;
}

void check_spec(const EncoderSpec& spec) {
  if (spec.input_dim == 0 || spec.embed_dim == 0) {
    throw InvalidInput("encoder: input_dim and embed_dim must be >= 1");
  }
  if (spec.kind == EncoderKind::kIdentity &&
      spec.input_dim != spec.embed_dim) {
    throw InvalidInput("identity encoder requires input_dim == embed_dim");
  }
  if (spec.kind == EncoderKind::kMlp && spec.hidden_dim == 0) {
    throw InvalidInput("mlp encoder requires hidden_dim >= 1");
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::optional<EncoderKind> parse_encoder_kind(std::string_view name) {
  if (name == "identity") return EncoderKind::kIdentity;
  if (name == "linear") return EncoderKind::kLinear;
  if (name == "mlp") return EncoderKind::kMlp;
  return std::nullopt;
}

std::string_view encoder_kind_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kIdentity:
      return "identity";
    case EncoderKind::kLinear:
      return "linear";
    case EncoderKind::kMlp:
      return "mlp";
  }
  return "unknown";
}

EncoderModel::EncoderModel(const EncoderSpec& spec) : spec_(spec) {
  check_spec(spec_);
  if (spec_.kind != EncoderKind::kMlp) spec_.hidden_dim = 0;
  switch (spec_.kind) {
    case EncoderKind::kIdentity:
      break;
    case EncoderKind::kLinear:
      layers_.push_back({Matrix(spec_.embed_dim, spec_.input_dim),
                         Vector(spec_.embed_dim, 0.0)});
      break;
    case EncoderKind::kMlp:
      layers_.push_back({Matrix(spec_.hidden_dim, spec_.input_dim),
                         Vector(spec_.hidden_dim, 0.0)});
      layers_.push_back({Matrix(spec_.embed_dim, spec_.hidden_dim),
                         Vector(spec_.embed_dim, 0.0)});
      break;
  }
  touch();
}

EncoderModel EncoderModel::initialized(const EncoderSpec& spec,
                                       std::uint64_t seed) {
  EncoderModel model(spec);
  Rng rng(seed);
  for (auto& layer : model.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols));
    for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
  }
  model.touch();
  return model;
}

void EncoderModel::set_layers(std::vector<DenseLayer> layers) {
  if (layers.size() != layers_.size()) {
    throw InvalidInput("encoder: wrong number of layers");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& want = layers_[i];
    const auto& got = layers[i];
    if (got.weight.rows != want.weight.rows ||
        got.weight.cols != want.weight.cols ||
        got.weight.data.size() != want.weight.data.size() ||
        got.bias.size() != want.bias.size()) {
      throw InvalidInput("encoder: layer " + std::to_string(i) +
                         " has the wrong shape");
    }
  }
  layers_ = std::move(layers);
  touch();
}

std::size_t EncoderModel::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.data.size() + l.bias.size();
  return n;
}

Vector EncoderModel::flat_parameters() const {
  Vector out;
  out.reserve(num_parameters());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.data.begin(), l.weight.data.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void EncoderModel::set_flat_parameters(ConstSpan values) {
  if (values.size() != num_parameters()) {
    throw InvalidInput("encoder: expected " + std::to_string(num_parameters()) +
                       " parameters, got " + std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (double& w : l.weight.data) w = values[k++];
    for (double& b : l.bias) b = values[k++];
  }
  touch();
}

void EncoderModel::apply_gradient(const std::vector<DenseLayer>& gradient,
                                  double learning_rate) {
  if (gradient.size() != layers_.size()) {
    throw InvalidInput("encoder: gradient has the wrong number of layers");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (gradient[i].weight.data.size() != layers_[i].weight.data.size() ||
        gradient[i].bias.size() != layers_[i].bias.size()) {
      throw InvalidInput("encoder: gradient shape mismatch");
    }
    axpy(-learning_rate, gradient[i].weight.data, layers_[i].weight.data);
    axpy(-learning_rate, gradient[i].bias, layers_[i].bias);
  }
  touch();
}

void EncoderModel::touch() { state_id_ = g_next_state_id.fetch_add(1); }

Vector l2_normalize(ConstSpan x) {
  const double n = norm(x);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("l2_normalize: vector norm must be positive and finite");
  }
  Vector out(x.begin(), x.end());
  for (double& v : out) v /= n;
  return out;
}

ForwardResult encoder_forward(const EncoderModel& model,
                              std::span<const Vector> inputs) {
  const EncoderSpec& spec = model.spec();
  ForwardResult out;
  ForwardCache& cache = out.cache;
  cache.state_id = model.state_id();
  cache.inputs.assign(inputs.begin(), inputs.end());
  for (const auto& x : inputs) {
    if (x.size() != spec.input_dim) {
      throw InvalidInput("encoder_forward: expected input dimension " +
                         std::to_string(spec.input_dim) + ", got " +
                         std::to_string(x.size()));
    }
    Vector z;
    switch (spec.kind) {
      case EncoderKind::kIdentity:
        z = x;
        break;
      case EncoderKind::kLinear:
        z = affine(model.layers()[0], x);
        break;
      case EncoderKind::kMlp: {
        Vector pre = affine(model.layers()[0], x);
        Vector h = pre;
        for (double& v : h) v = v > 0.0 ? v : 0.0;
        z = affine(model.layers()[1], h);
        cache.hidden_pre.push_back(std::move(pre));
        cache.hidden.push_back(std::move(h));
        break;
      }
    }
    if (spec.normalize_output) {
      const double n = norm(z);
      cache.raw_norms.push_back(n);
      Vector y = z;
      if (n > 0.0) {
        for (double& v : y) v /= n;
      }
      out.embeddings.push_back(std::move(y));
    } else {
      out.embeddings.push_back(z);
    }
    cache.raw.push_back(std::move(z));
  }
  return out;
}

std::vector<Vector> encode(const EncoderModel& model,
                           std::span<const Vector> inputs) {
  return encoder_forward(model, inputs).embeddings;
}

EncoderGradients encoder_backward(const EncoderModel& model,
                                  const ForwardCache& cache,
                                  std::span<const Vector> grad_embeddings) {
  const EncoderSpec& spec = model.spec();
  if (cache.state_id != model.state_id()) {
    throw InvalidInput(
        "encoder_backward: cache was produced by a different parameter state");
  }
  if (grad_embeddings.size() != cache.inputs.size() ||
      cache.raw.size() != cache.inputs.size()) {
    throw InvalidInput("encoder_backward: batch size does not match cache");
  }
  EncoderGradients out;
  out.layers = zero_layers_like(model.layers());
  out.inputs.reserve(cache.inputs.size());
  for (std::size_t s = 0; s < cache.inputs.size(); ++s) {
    if (grad_embeddings[s].size() != spec.embed_dim) {
      throw InvalidInput("encoder_backward: gradient has wrong dimension");
    }
    Vector g = grad_embeddings[s];
    if (spec.normalize_output) {
      // d(z/|z|) = (I - y y^T) / |z|
      const double n = cache.raw_norms[s];
      if (n > 0.0) {
        const Vector& z = cache.raw[s];
        const double proj = dot(z, g) / (n * n);
        for (std::size_t k = 0; k < g.size(); ++k) {
          g[k] = (g[k] - proj * z[k]) / n;
        }
      } else {
        std::fill(g.begin(), g.end(), 0.0);
      }
    }
    switch (spec.kind) {
      case EncoderKind::kIdentity:
        out.inputs.push_back(std::move(g));
        break;
      case EncoderKind::kLinear:
        out.inputs.push_back(affine_backward(model.layers()[0],
                                             cache.inputs[s], g,
                                             out.layers[0]));
        break;
      case EncoderKind::kMlp: {
        Vector gh = affine_backward(model.layers()[1], cache.hidden[s], g,
                                    out.layers[1]);
        for (std::size_t k = 0; k < gh.size(); ++k) {
          if (!(cache.hidden_pre[s][k] > 0.0)) gh[k] = 0.0;
        }
        out.inputs.push_back(affine_backward(model.layers()[0],
                                             cache.inputs[s], gh,
                                             out.layers[0]));
        break;
      }
    }
  }
  return out;
}

}  // namespace angmetric
