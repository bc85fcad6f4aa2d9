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

#include "angmetric/npair_batch.hpp"

#include <set>
#include <string>

namespace angmetric {

NPairBatch NPairBatch::from_pairs(std::vector<Vector> vectors,
                                  std::vector<Label> labels) {
  NPairBatch b;
  b.vectors = std::move(vectors);
  b.labels = std::move(labels);
  for (std::size_t i = 0; i + 1 < b.vectors.size(); i += 2) {
    b.pairs.emplace_back(i, i + 1);
  }
  return b;
}

void validate_npair_batch(const NPairBatch& batch) {
  const std::size_t n = batch.size();
  if (n < 4 || n % 2 != 0) {
    throw InvalidInput("NPairBatch: size must be even and >= 4, got " +
                       std::to_string(n));
  }
  if (batch.labels.size() != n) {
    throw InvalidInput("NPairBatch: label count does not match vectors");
  }
  if (batch.pairs.size() != n / 2) {
    throw InvalidInput("NPairBatch: expected " + std::to_string(n / 2) +
                       " pairs, got " + std::to_string(batch.pairs.size()));
  }
  if (!batch.positions.empty() && batch.positions.size() != n) {
    throw InvalidInput("NPairBatch: position count does not match vectors");
  }
  const std::size_t dim = batch.vectors.front().size();
  if (dim == 0) throw InvalidInput("NPairBatch: zero-dimensional vectors");
  for (const auto& v : batch.vectors) {
    if (v.size() != dim) throw InvalidInput("NPairBatch: dimension mismatch");
    if (!all_finite(v)) throw InvalidInput("NPairBatch: non-finite component");
  }
  std::vector<bool> seen(n, false);
  std::set<Label> pair_labels;
  for (const auto& [a, p] : batch.pairs) {
    if (a >= n || p >= n || a == p || seen[a] || seen[p]) {
      throw InvalidInput("NPairBatch: pairs must partition the samples");
    }
    seen[a] = seen[p] = true;
    if (batch.labels[a] != batch.labels[p]) {
      throw InvalidInput("NPairBatch: pair members have different labels");
    }
    if (!pair_labels.insert(batch.labels[a]).second) {
      throw InvalidInput("NPairBatch: label " +
                         std::to_string(batch.labels[a]) +
                         " appears in more than one pair");
    }
    if (!batch.positions.empty() &&
        batch.positions[a] == batch.positions[p]) {
      throw InvalidInput("NPairBatch: pair repeats a dataset position");
    }
  }
}

std::vector<std::size_t> pair_partners(const NPairBatch& batch) {
  std::vector<std::size_t> partner(batch.size());
  for (const auto& [a, p] : batch.pairs) {
    partner[a] = p;
    partner[p] = a;
  }
  return partner;
}

}  // namespace angmetric
