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

#include "angmetric/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace angmetric {
namespace {

void check_margin(double margin) {
  if (!(margin >= 0.0) || !std::isfinite(margin)) {
    throw InvalidInput("triplet margin must be finite and >= 0");
  }
}

std::vector<Vector> zero_gradients(std::size_t count, std::size_t dim) {
  return std::vector<Vector>(count, Vector(dim, 0.0));
}

// Adds the gradient of one active triplet hinge, scaled.
void add_triplet_gradient(ConstSpan a, ConstSpan p, ConstSpan n, double scale,
                          Vector& ga, Vector& gp, Vector& gn) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    ga[k] += scale * 2.0 * (n[k] - p[k]);
    gp[k] += scale * 2.0 * (p[k] - a[k]);
    gn[k] += scale * 2.0 * (a[k] - n[k]);
  }
}

// Shared driver for the log(1 + sum_n exp(score)) batch losses. For every
// anchor i with partner p and each differently labelled j, `score(i, p, j)`
// gives the exponent and `backprop(i, p, j, w, grads)` adds w * d score to
// the gradients. The anchor loop runs in index order so the accumulation is
// reproducible bit for bit.
template <class Score, class Backprop>
LossResult log_sum_exp_batch(const NPairBatch& batch, Score score,
                             Backprop backprop, bool with_gradients,
                             std::vector<double>* terms = nullptr) {
  validate_npair_batch(batch);
  const std::size_t n = batch.size();
  const std::size_t dim = batch.vectors.front().size();
  const auto partner = pair_partners(batch);
  const double inv_n = 1.0 / static_cast<double>(n);

  LossResult out;
  if (with_gradients) out.gradients = zero_gradients(n, dim);
  std::vector<std::size_t> negatives;
  std::vector<double> f;
  negatives.reserve(n);
  f.reserve(n);
  if (terms) terms->assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = partner[i];
    negatives.clear();
    f.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (batch.labels[j] == batch.labels[i]) continue;
      negatives.push_back(j);
      f.push_back(score(i, p, j));
    }
    // log(1 + sum exp f) with the implicit 1 = exp(0) taking part in the max.
    double shift = 0.0;
    for (double v : f) shift = std::max(shift, v);
    double denom = std::exp(-shift);
    for (double v : f) denom += std::exp(v - shift);
    const double term = shift + std::log(denom);
    if (terms) (*terms)[i] = term;
    out.value += term;
    if (!with_gradients) continue;
    for (std::size_t k = 0; k < negatives.size(); ++k) {
      const double w = std::exp(f[k] - shift) / denom;
      backprop(i, p, negatives[k], w * inv_n, out.gradients);
    }
  }
  out.value *= inv_n;
  return out;
}

LossResult angular_batch_impl(const NPairBatch& batch,
                              const AngularParams& params, bool with_gradients,
                              std::vector<double>* terms) {
  const double t2 = params.tan_sq_alpha();
  const auto& x = batch.vectors;
  auto score = [&](std::size_t i, std::size_t p, std::size_t j) {
    return f_apn(x[i], x[p], x[j], params);
  };
  // df/da = 4t^2 n - 2(1+t^2) p, df/dp = 4t^2 n - 2(1+t^2) a,
  // df/dn = 4t^2 (a + p)
  auto backprop = [&](std::size_t i, std::size_t p, std::size_t j, double w,
                      std::vector<Vector>& g) {
    const double c_n = 4.0 * t2 * w;
    const double c_ap = 2.0 * (1.0 + t2) * w;
    for (std::size_t k = 0; k < x[i].size(); ++k) {
      g[i][k] += c_n * x[j][k] - c_ap * x[p][k];
      g[p][k] += c_n * x[j][k] - c_ap * x[i][k];
      g[j][k] += c_n * (x[i][k] + x[p][k]);
    }
  };
  return log_sum_exp_batch(batch, score, backprop, with_gradients, terms);
}

}  // namespace

AngularParams::AngularParams(double alpha_degrees)
    : alpha_degrees_(alpha_degrees) {
  check_alpha_degrees(alpha_degrees);
  const double t = tan_degrees(alpha_degrees);
  tan_sq_alpha_ = t * t;
}

double triplet_hinge_argument(const Triplet& t, double margin) {
  check_margin(margin);
  return squared_distance(t.anchor(), t.positive()) -
         squared_distance(t.anchor(), t.negative()) + margin;
}

double angular_hinge_argument(const Triplet& t, const AngularParams& params) {
  const Vector c = positive_center(t.anchor(), t.positive());
  return squared_distance(t.anchor(), t.positive()) -
         4.0 * params.tan_sq_alpha() * squared_distance(t.negative(), c);
}

LossResult triplet_loss(const Triplet& t, double margin) {
  const double arg = triplet_hinge_argument(t, margin);
  LossResult out;
  out.gradients = zero_gradients(3, t.dim());
  if (arg > 0.0) {
    out.value = arg;
    add_triplet_gradient(t.anchor(), t.positive(), t.negative(), 1.0,
                         out.gradients[kAnchor], out.gradients[kPositive],
                         out.gradients[kNegative]);
  }
  return out;
}

LossResult angular_loss(const Triplet& t, const AngularParams& params) {
  const double arg = angular_hinge_argument(t, params);
  LossResult out;
  out.gradients = zero_gradients(3, t.dim());
  if (!(arg > 0.0)) return out;
  out.value = arg;
  const double t2 = params.tan_sq_alpha();
  const Vector& a = t.anchor();
  const Vector& p = t.positive();
  const Vector& n = t.negative();
  for (std::size_t k = 0; k < t.dim(); ++k) {
    const double spread = a[k] + p[k] - 2.0 * n[k];
    out.gradients[kAnchor][k] = 2.0 * (a[k] - p[k]) - 2.0 * t2 * spread;
    out.gradients[kPositive][k] = 2.0 * (p[k] - a[k]) - 2.0 * t2 * spread;
    out.gradients[kNegative][k] = 4.0 * t2 * spread;
  }
  return out;
}

double f_apn(ConstSpan anchor, ConstSpan positive, ConstSpan negative,
             const AngularParams& params) {
  require_same_dim(anchor, positive, "f_apn");
  require_same_dim(anchor, negative, "f_apn");
  const double t2 = params.tan_sq_alpha();
  double ap_n = 0.0;
  for (std::size_t k = 0; k < anchor.size(); ++k) {
    ap_n += (anchor[k] + positive[k]) * negative[k];
  }
  return 4.0 * t2 * ap_n - 2.0 * (1.0 + t2) * dot(anchor, positive);
}

LossResult angular_loss_batch(const NPairBatch& batch,
                              const AngularParams& params,
                              bool with_gradients) {
  return angular_batch_impl(batch, params, with_gradients, nullptr);
}

std::vector<double> angular_batch_anchor_terms(const NPairBatch& batch,
                                               const AngularParams& params) {
  std::vector<double> terms;
  angular_batch_impl(batch, params, false, &terms);
  return terms;
}

LossResult npair_loss_batch(const NPairBatch& batch, bool with_gradients) {
  const auto& x = batch.vectors;
  auto score = [&](std::size_t i, std::size_t p, std::size_t j) {
    return dot(x[i], x[j]) - dot(x[i], x[p]);
  };
  auto backprop = [&](std::size_t i, std::size_t p, std::size_t j, double w,
                      std::vector<Vector>& g) {
    for (std::size_t k = 0; k < x[i].size(); ++k) {
      g[i][k] += w * (x[j][k] - x[p][k]);
      g[p][k] -= w * x[i][k];
      g[j][k] += w * x[i][k];
    }
  };
  return log_sum_exp_batch(batch, score, backprop, with_gradients);
}

LossResult combined_loss_batch(const NPairBatch& batch,
                               const AngularParams& params, double lambda,
                               bool with_gradients) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("lambda must be finite and >= 0");
  }
  LossResult out = npair_loss_batch(batch, with_gradients);
  const LossResult ang = angular_loss_batch(batch, params, with_gradients);
  out.value += lambda * ang.value;
  for (std::size_t i = 0; i < out.gradients.size(); ++i) {
    axpy(lambda, ang.gradients[i], out.gradients[i]);
  }
  return out;
}

LossResult triplet_loss_npair_batch(const NPairBatch& batch, double margin,
                                    bool with_gradients) {
  check_margin(margin);
  validate_npair_batch(batch);
  const std::size_t n = batch.size();
  const auto& x = batch.vectors;
  const auto partner = pair_partners(batch);
  const double scale = 1.0 / static_cast<double>(n * (n - 2));
  LossResult out;
  if (with_gradients) out.gradients = zero_gradients(n, x.front().size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = partner[i];
    const double d_ap = squared_distance(x[i], x[p]);
    for (std::size_t j = 0; j < n; ++j) {
      if (batch.labels[j] == batch.labels[i]) continue;
      const double arg = d_ap - squared_distance(x[i], x[j]) + margin;
      if (!(arg > 0.0)) continue;
      out.value += arg;
      if (!with_gradients) continue;
      add_triplet_gradient(x[i], x[p], x[j], scale, out.gradients[i],
                           out.gradients[p], out.gradients[j]);
    }
  }
  out.value *= scale;
  return out;
}

LossResult triplet_loss_mean(std::span<const Triplet> triplets, double margin) {
  check_margin(margin);
  if (triplets.empty()) throw InvalidInput("triplet_loss_mean: no triplets");
  const std::size_t dim = triplets.front().dim();
  const double scale = 1.0 / static_cast<double>(triplets.size());
  LossResult out;
  out.gradients = zero_gradients(3 * triplets.size(), dim);
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    if (triplets[t].dim() != dim) {
      throw InvalidInput("triplet_loss_mean: dimension mismatch");
    }
    const LossResult one = triplet_loss(triplets[t], margin);
    out.value += one.value;
    for (std::size_t r = 0; r < 3; ++r) {
      axpy(scale, one.gradients[r], out.gradients[3 * t + r]);
    }
  }
  out.value *= scale;
  return out;
}

std::vector<Vector> finite_difference_gradient(const StackedLossFn& loss_fn,
                                               std::vector<Vector> inputs,
                                               double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInput("finite_difference_gradient: step must be > 0");
  }
  std::vector<Vector> grad;
  grad.reserve(inputs.size());
  for (std::size_t v = 0; v < inputs.size(); ++v) {
    Vector g(inputs[v].size());
    for (std::size_t k = 0; k < inputs[v].size(); ++k) {
      const double saved = inputs[v][k];
      inputs[v][k] = saved + step;
      const double up = loss_fn(inputs);
      inputs[v][k] = saved - step;
      const double down = loss_fn(inputs);
      inputs[v][k] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError(
            "finite_difference_gradient: non-finite loss at input " +
            std::to_string(v) + ", coordinate " + std::to_string(k));
      }
      g[k] = (up - down) / (2.0 * step);
    }
    grad.push_back(std::move(g));
  }
  return grad;
}

double gradient_relative_error(std::span<const Vector> analytic,
                               std::span<const Vector> numeric) {
  if (analytic.size() != numeric.size()) {
    throw InvalidInput("gradient_relative_error: input count mismatch");
  }
  double diff = 0.0, scale = 0.0;
  for (std::size_t v = 0; v < analytic.size(); ++v) {
    require_same_dim(analytic[v], numeric[v], "gradient_relative_error");
    for (std::size_t k = 0; k < analytic[v].size(); ++k) {
      diff = std::max(diff, std::abs(analytic[v][k] - numeric[v][k]));
      scale = std::max(
          scale, std::max(std::abs(analytic[v][k]), std::abs(numeric[v][k])));
    }
  }
  return scale == 0.0 ? 0.0 : diff / scale;
}

}  // namespace angmetric
