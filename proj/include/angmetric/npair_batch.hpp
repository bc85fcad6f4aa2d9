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

#include <utility>
#include <vector>

#include "angmetric/dataset.hpp"

namespace angmetric {

/// N samples arranged as N/2 same-class pairs from N/2 distinct classes.
///
/// `pairs` hold indices into `vectors`/`labels`. Every sample appears in
/// exactly one pair and anchors exactly one tuplet: its partner is the
/// positive and the N - 2 differently labelled samples are the negatives.
/// `positions` records where each sample came from in the source dataset
/// (empty for hand-built batches).
struct NPairBatch {
  std::vector<Vector> vectors;
  std::vector<Label> labels;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> positions;

  std::size_t size() const { return vectors.size(); }

  /// Builds the canonical layout [a0, p0, a1, p1, ...] with pairs (2i, 2i+1).
  static NPairBatch from_pairs(std::vector<Vector> vectors,
                               std::vector<Label> labels);
};

/// Throws InvalidInput unless every NPairBatch invariant holds: N even and
/// >= 4, pairs partition the samples, pair members share a label, pair
/// labels are pairwise distinct, vectors share one dimension.
void validate_npair_batch(const NPairBatch& batch);

/// partner[i] is the other member of i's pair. Assumes a valid batch.
std::vector<std::size_t> pair_partners(const NPairBatch& batch);

}  // namespace angmetric
