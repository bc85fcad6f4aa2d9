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
#include <string>
#include <string_view>

namespace angmetric {

enum class CheckedLoss {
  kTriplet,
  kAngular,
  kAngularBatch,
  kNPair,
  kCombined,
  kTripletNPair,
};

std::optional<CheckedLoss> parse_checked_loss(std::string_view name);
std::string_view checked_loss_name(CheckedLoss loss);

struct GradCheckOptions {
  std::size_t trials = 1000;
  std::size_t dim = 8;
  double tolerance = 1e-5;
  double step = 1e-5;
  /// Instances whose hinge argument lies within this distance of zero are
  /// skipped; the central difference straddles the kink there.
  double kink_band = 1e-3;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  std::size_t trials = 0;
  std::size_t checked = 0;
  std::size_t kink_skipped = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

/// Compares analytic gradients with central finite differences on random
/// unit-scale instances (components N(0, 1/D)). Batch losses draw N from
/// {4, 6, 8}; alpha is drawn from [20, 60] degrees and the triplet margin
/// from [0, 1]. Passes when at least one instance was checked and the
/// largest relative error is strictly below the tolerance.
GradCheckReport run_gradient_check(CheckedLoss loss,
                                   const GradCheckOptions& options);

}  // namespace angmetric
