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

#include <functional>
#include <span>
#include <vector>

#include "angmetric/geometry.hpp"
#include "angmetric/npair_batch.hpp"

namespace angmetric {

inline constexpr double kDefaultMargin = 0.1;
inline constexpr double kDefaultLambda = 2.0;

/// Loss value plus one gradient per input.
///
/// Single-triplet losses index gradients by TripletRole. Batch losses index
/// them by sample position in the batch, accumulated over every role the
/// sample plays.
struct LossResult {
  double value = 0.0;
  std::vector<Vector> gradients;
};

enum TripletRole : std::size_t { kAnchor = 0, kPositive = 1, kNegative = 2 };

class AngularParams {
 public:
  explicit AngularParams(double alpha_degrees);

  double alpha_degrees() const { return alpha_degrees_; }
  double tan_sq_alpha() const { return tan_sq_alpha_; }

 private:
  double alpha_degrees_;
  double tan_sq_alpha_;
};

/// |a - p|^2 - |a - n|^2 + margin
double triplet_hinge_argument(const Triplet& t, double margin);

/// |a - p|^2 - 4 tan^2(alpha) |n - c|^2, c the anchor/positive midpoint.
double angular_hinge_argument(const Triplet& t, const AngularParams& params);

LossResult triplet_loss(const Triplet& t, double margin = kDefaultMargin);

LossResult angular_loss(const Triplet& t, const AngularParams& params);

/// 4 tan^2(alpha) (a + p)^T n - 2 (1 + tan^2(alpha)) a^T p
///
/// For unit-norm inputs this differs from angular_hinge_argument by the
/// constant 2 - 6 tan^2(alpha).
double f_apn(ConstSpan anchor, ConstSpan positive, ConstSpan negative,
             const AngularParams& params);

/// Mean over the N anchors of log(1 + sum_n exp(f_apn)).
LossResult angular_loss_batch(const NPairBatch& batch,
                              const AngularParams& params,
                              bool with_gradients = true);

/// Per-anchor log(1 + sum_n exp(f_apn)) terms of angular_loss_batch.
std::vector<double> angular_batch_anchor_terms(const NPairBatch& batch,
                                               const AngularParams& params);

/// Mean over the N anchors of log(1 + sum_n exp(a^T n - a^T p)).
LossResult npair_loss_batch(const NPairBatch& batch, bool with_gradients = true);

/// npair_loss_batch + lambda * angular_loss_batch.
LossResult combined_loss_batch(const NPairBatch& batch,
                               const AngularParams& params,
                               double lambda = kDefaultLambda,
                               bool with_gradients = true);

/// Triplet hinge averaged over all N (N - 2) tuplet triplets of the batch.
LossResult triplet_loss_npair_batch(const NPairBatch& batch,
                                    double margin = kDefaultMargin,
                                    bool with_gradients = true);

/// Triplet hinge averaged over independent triplets. Gradients are laid out
/// as [a0, p0, n0, a1, p1, n1, ...].
LossResult triplet_loss_mean(std::span<const Triplet> triplets,
                             double margin = kDefaultMargin);

/// Scalar function of a stack of vectors.
using StackedLossFn = std::function<double(const std::vector<Vector>&)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every
/// coordinate of every input. Throws NumericalError when an evaluation is
/// not finite.
std::vector<Vector> finite_difference_gradient(const StackedLossFn& loss_fn,
                                               std::vector<Vector> inputs,
                                               double step);

/// max |a - b| / max(|a|_inf, |b|_inf); 0 when both are identically zero.
double gradient_relative_error(std::span<const Vector> analytic,
                               std::span<const Vector> numeric);

}  // namespace angmetric
