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

#include "angmetric/gradient_check.hpp"

#include <array>
#include <cmath>

#include "angmetric/losses.hpp"
#include "angmetric/rng.hpp"

namespace angmetric {
namespace {

constexpr std::array<std::pair<CheckedLoss, std::string_view>, 6> kNames{{
    {CheckedLoss::kTriplet, "triplet"},
    {CheckedLoss::kAngular, "angular"},
    {CheckedLoss::kAngularBatch, "angular-batch"},
    {CheckedLoss::kNPair, "npair"},
    {CheckedLoss::kCombined, "npair-angular"},
    {CheckedLoss::kTripletNPair, "triplet-npair"},
}};

Vector random_vector(Rng& rng, std::size_t dim) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Vector v(dim);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

struct Instance {
  std::vector<Vector> inputs;
  std::vector<Vector> analytic;
  StackedLossFn fn;
  bool near_kink = false;
};

Instance make_triplet_instance(Rng& rng, std::size_t dim, double band,
                               bool angular) {
  Instance inst;
  for (int r = 0; r < 3; ++r) inst.inputs.push_back(random_vector(rng, dim));
  const Triplet t(inst.inputs[0], inst.inputs[1], inst.inputs[2]);
  if (angular) {
    const AngularParams params(rng.uniform(20.0, 60.0));
    inst.near_kink = std::abs(angular_hinge_argument(t, params)) < band;
    inst.analytic = angular_loss(t, params).gradients;
    inst.fn = [params](const std::vector<Vector>& x) {
      return angular_loss(Triplet(x[0], x[1], x[2]), params).value;
    };
  } else {
    const double margin = rng.uniform01();
    inst.near_kink = std::abs(triplet_hinge_argument(t, margin)) < band;
    inst.analytic = triplet_loss(t, margin).gradients;
    inst.fn = [margin](const std::vector<Vector>& x) {
      return triplet_loss(Triplet(x[0], x[1], x[2]), margin).value;
    };
  }
  return inst;
}

Instance make_batch_instance(Rng& rng, std::size_t dim, double band,
                             CheckedLoss loss) {
  const std::size_t n = 4 + 2 * rng.uniform_index(3);
  std::vector<Label> labels;
  Instance inst;
  for (std::size_t i = 0; i < n; ++i) {
    inst.inputs.push_back(random_vector(rng, dim));
    labels.push_back(static_cast<Label>(i / 2));
  }
  const NPairBatch batch = NPairBatch::from_pairs(inst.inputs, labels);
  const AngularParams params(rng.uniform(20.0, 60.0));
  const double margin = rng.uniform01();

  auto evaluate = [=](const std::vector<Vector>& x, bool grads) -> LossResult {
    NPairBatch b = batch;
    b.vectors = x;
    switch (loss) {
      case CheckedLoss::kAngularBatch:
        return angular_loss_batch(b, params, grads);
      case CheckedLoss::kNPair:
        return npair_loss_batch(b, grads);
      case CheckedLoss::kCombined:
        return combined_loss_batch(b, params, kDefaultLambda, grads);
      default:
        return triplet_loss_npair_batch(b, margin, grads);
    }
  };
  if (loss == CheckedLoss::kTripletNPair) {
    for (std::size_t i = 0; i < n && !inst.near_kink; ++i) {
      const std::size_t p = i ^ 1;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] == labels[i]) continue;
        const double arg = squared_distance(inst.inputs[i], inst.inputs[p]) -
                           squared_distance(inst.inputs[i], inst.inputs[j]) +
                           margin;
        if (std::abs(arg) < band) {
          inst.near_kink = true;
          break;
        }
      }
    }
  }
  inst.analytic = evaluate(inst.inputs, true).gradients;
  inst.fn = [evaluate](const std::vector<Vector>& x) {
    return evaluate(x, false).value;
  };
  return inst;
}

}  // namespace

std::optional<CheckedLoss> parse_checked_loss(std::string_view name) {
  for (const auto& [loss, n] : kNames) {
    if (n == name) return loss;
  }
  return std::nullopt;
}

std::string_view checked_loss_name(CheckedLoss loss) {
  for (const auto& [l, n] : kNames) {
    if (l == loss) return n;
  }
  return "unknown";
}

GradCheckReport run_gradient_check(CheckedLoss loss,
                                   const GradCheckOptions& options) {
  if (options.dim == 0) throw InvalidInput("grad-check: dim must be >= 1");
  if (!(options.tolerance >= 0.0)) {
    throw InvalidInput("grad-check: tolerance must be >= 0");
  }
  Rng rng(options.seed);
  GradCheckReport report;
  report.trials = options.trials;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Instance inst =
        (loss == CheckedLoss::kTriplet || loss == CheckedLoss::kAngular)
            ? make_triplet_instance(rng, options.dim, options.kink_band,
                                    loss == CheckedLoss::kAngular)
            : make_batch_instance(rng, options.dim, options.kink_band, loss);
    if (inst.near_kink) {
      ++report.kink_skipped;
      continue;
    }
    const auto numeric =
        finite_difference_gradient(inst.fn, inst.inputs, options.step);
    report.max_relative_error =
        std::max(report.max_relative_error,
                 gradient_relative_error(inst.analytic, numeric));
    ++report.checked;
  }
  report.passed =
      report.checked > 0 && report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace angmetric
