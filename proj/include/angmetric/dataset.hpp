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
#include <map>
#include <span>
#include <vector>

#include "angmetric/vector_ops.hpp"

namespace angmetric {

using Label = std::int64_t;

/// Labelled feature vectors with a label -> positions index.
///
/// All vectors share one dimension; labels are nonnegative. The class index
/// is rebuilt on construction, so it is always the exact inverse of the
/// label column. Positions listed per class are ascending.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::vector<Vector> samples, std::vector<Label> labels);

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return samples_.empty(); }

  const Vector& sample(std::size_t i) const { return samples_[i]; }
  Label label(std::size_t i) const { return labels_[i]; }
  const std::vector<Vector>& samples() const { return samples_; }
  const std::vector<Label>& labels() const { return labels_; }

  const std::map<Label, std::vector<std::size_t>>& class_index() const {
    return class_index_;
  }
  std::size_t num_classes() const { return class_index_.size(); }

  /// Rows at `positions`, in that order.
  LabeledDataset subset(std::span<const std::size_t> positions) const;

 private:
  std::vector<Vector> samples_;
  std::vector<Label> labels_;
  std::size_t dim_ = 0;
  std::map<Label, std::vector<std::size_t>> class_index_;
};

}  // namespace angmetric
