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

#include "angmetric/dataset.hpp"

#include <string>

namespace angmetric {

LabeledDataset::LabeledDataset(std::vector<Vector> samples,
                               std::vector<Label> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.size() != labels_.size()) {
    throw InvalidInput("LabeledDataset: " + std::to_string(samples_.size()) +
                       " samples but " + std::to_string(labels_.size()) +
                       " labels");
  }
  if (samples_.empty()) return;
  dim_ = samples_.front().size();
  if (dim_ == 0) throw InvalidInput("LabeledDataset: zero-dimensional samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].size() != dim_) {
      throw InvalidInput("LabeledDataset: row " + std::to_string(i) +
                         " has dimension " +
                         std::to_string(samples_[i].size()) + ", expected " +
                         std::to_string(dim_));
    }
    if (!all_finite(samples_[i])) {
      throw InvalidInput("LabeledDataset: non-finite value in row " +
                         std::to_string(i));
    }
    if (labels_[i] < 0) {
      throw InvalidInput("LabeledDataset: negative label in row " +
                         std::to_string(i));
    }
    class_index_[labels_[i]].push_back(i);
  }
}

LabeledDataset LabeledDataset::subset(
    std::span<const std::size_t> positions) const {
  std::vector<Vector> s;
  std::vector<Label> l;
  s.reserve(positions.size());
  l.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= size()) throw InvalidInput("LabeledDataset::subset: out of range");
    s.push_back(samples_[p]);
    l.push_back(labels_[p]);
  }
  return LabeledDataset(std::move(s), std::move(l));
}

}  // namespace angmetric
