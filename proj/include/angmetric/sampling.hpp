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

#include <array>
#include <cstdint>
#include <vector>

#include "angmetric/dataset.hpp"
#include "angmetric/geometry.hpp"
#include "angmetric/npair_batch.hpp"
#include "angmetric/rng.hpp"

namespace angmetric {

/// Dataset positions of one (anchor, positive, negative) triple.
using TripletPositions = std::array<std::size_t, 3>;

/// Draws mini-batches from a dataset, one batch per call, i.i.d. across
/// calls. Owns its RNG; single consumer. The dataset must outlive the
/// sampler.
class Sampler {
 public:
  Sampler(const LabeledDataset& data, std::uint64_t seed);

  /// `count` independent triplets with y_a == y_p != y_n and a != p.
  /// Anchor class uniform over classes with >= 2 samples, negative class
  /// uniform over the remaining classes, members uniform within a class.
  std::vector<TripletPositions> disjoint_triplets(std::size_t count);

  /// n/2 distinct classes (without replacement, among classes with >= 2
  /// samples), two distinct samples from each. Layout [a0, p0, a1, p1, ...].
  NPairBatch npair_batch(std::size_t n);

 private:
  const LabeledDataset* data_;
  Rng rng_;
  std::vector<Label> classes_;
  std::vector<Label> eligible_;
};

std::vector<Triplet> sample_disjoint_triplets(const LabeledDataset& data,
                                              std::size_t count,
                                              std::uint64_t seed);

NPairBatch sample_npair_batch(const LabeledDataset& data, std::size_t n,
                              std::uint64_t seed);

}  // namespace angmetric
