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

#include "angmetric/sampling.hpp"

#include <string>
#include <utility>

namespace angmetric {

Sampler::Sampler(const LabeledDataset& data, std::uint64_t seed)
    : data_(&data), rng_(seed) {
  for (const auto& [label, members] : data.class_index()) {
    classes_.push_back(label);
    if (members.size() >= 2) eligible_.push_back(label);
  }
}

std::vector<TripletPositions> Sampler::disjoint_triplets(std::size_t count) {
  if (count == 0) throw InvalidInput("disjoint_triplets: count must be >= 1");
  if (classes_.size() < 2) {
    throw SamplingError("disjoint_triplets: dataset needs >= 2 classes, has " +
                        std::to_string(classes_.size()));
  }
  if (eligible_.empty()) {
    throw SamplingError(
        "disjoint_triplets: no class has two samples for an anchor/positive");
  }
  const auto& index = data_->class_index();
  std::vector<TripletPositions> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const Label pos_class = eligible_[rng_.uniform_index(eligible_.size())];
    const auto& members = index.at(pos_class);
    const std::size_t ia = rng_.uniform_index(members.size());
    std::size_t ip = rng_.uniform_index(members.size() - 1);
    if (ip >= ia) ++ip;
    // Uniform over the other classes: draw from K - 1 slots, skip the
    // positive class.
    std::size_t slot = rng_.uniform_index(classes_.size() - 1);
    Label neg_class = classes_[slot];
    if (neg_class >= pos_class) neg_class = classes_[slot + 1];
    const auto& negatives = index.at(neg_class);
    out.push_back({members[ia], members[ip],
                   negatives[rng_.uniform_index(negatives.size())]});
  }
  return out;
}

NPairBatch Sampler::npair_batch(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidInput("npair_batch: batch size must be even and >= 4, got " +
                       std::to_string(n));
  }
  const std::size_t want = n / 2;
  if (eligible_.size() < want) {
    throw SamplingError("npair_batch: need " + std::to_string(want) +
                        " classes with >= 2 samples, dataset has " +
                        std::to_string(eligible_.size()));
  }
  // Partial Fisher-Yates over the eligible classes.
  std::vector<Label> pool = eligible_;
  const auto& index = data_->class_index();
  NPairBatch batch;
  batch.vectors.reserve(n);
  batch.labels.reserve(n);
  batch.positions.reserve(n);
  for (std::size_t c = 0; c < want; ++c) {
    const std::size_t pick = c + rng_.uniform_index(pool.size() - c);
    std::swap(pool[c], pool[pick]);
    const auto& members = index.at(pool[c]);
    const std::size_t ia = rng_.uniform_index(members.size());
    std::size_t ip = rng_.uniform_index(members.size() - 1);
    if (ip >= ia) ++ip;
    for (std::size_t m : {members[ia], members[ip]}) {
      batch.vectors.push_back(data_->sample(m));
      batch.labels.push_back(pool[c]);
      batch.positions.push_back(m);
    }
    batch.pairs.emplace_back(2 * c, 2 * c + 1);
  }
  return batch;
}

std::vector<Triplet> sample_disjoint_triplets(const LabeledDataset& data,
                                              std::size_t count,
                                              std::uint64_t seed) {
  Sampler sampler(data, seed);
  std::vector<Triplet> out;
  for (const auto& [a, p, n] : sampler.disjoint_triplets(count)) {
    out.emplace_back(data.sample(a), data.sample(p), data.sample(n));
  }
  return out;
}

NPairBatch sample_npair_batch(const LabeledDataset& data, std::size_t n,
                              std::uint64_t seed) {
  return Sampler(data, seed).npair_batch(n);
}

}  // namespace angmetric
