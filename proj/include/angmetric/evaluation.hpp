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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "angmetric/dataset.hpp"

namespace angmetric {

struct MetricReport {
  std::map<std::size_t, double> recall_at;
  double nmi = 0.0;
  double f1 = 0.0;
  std::size_t k_used = 0;
  std::size_t num_queries = 0;
  /// Whether the evaluated embeddings were L2-normalized, when known.
  std::optional<bool> normalize_output;
};

/// Partitions the classes: round(fraction * K) shuffled classes go to the
/// first set, the rest to the second. Row order is preserved on both sides.
std::pair<LabeledDataset, LabeledDataset> split_by_class(
    const LabeledDataset& data, double train_fraction_of_classes,
    std::uint64_t seed);

/// Fraction of queries whose R nearest neighbours (squared Euclidean, the
/// query itself excluded, ties broken by lower index) contain a sample of
/// the query's label, for every R in `r_values`.
std::map<std::size_t, double> recall_at_r(std::span<const Vector> embeddings,
                                          std::span<const Label> labels,
                                          std::span<const std::size_t> r_values);

struct KMeansResult {
  std::vector<Label> assignments;
  double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeding, best of 10 restarts by
/// within-cluster sum of squares. Stops when no centroid moves by 1e-6 or
/// more, or after 300 iterations.
KMeansResult kmeans(std::span<const Vector> points, std::size_t k,
                    std::uint64_t seed);

/// Mutual information over the arithmetic mean of the two entropies; 1 when
/// both partitions are a single cluster.
double nmi(std::span<const Label> predicted, std::span<const Label> truth);

/// F1 of the "same predicted cluster" predicate against "same class" over
/// all unordered sample pairs.
double pairwise_f1(std::span<const Label> predicted,
                   std::span<const Label> truth);

/// Recall@R for every R plus NMI/F1 of k-means with k clusters (defaults to
/// the number of distinct labels).
MetricReport evaluate_embeddings(std::span<const Vector> embeddings,
                                 std::span<const Label> labels,
                                 std::span<const std::size_t> r_values,
                                 std::optional<std::size_t> k,
                                 std::uint64_t seed);

/// `# queries=.. k=.. normalize_output=..` then `metric\tvalue` lines with
/// six decimals: recall@R in ascending R, nmi, f1.
std::string format_report(const MetricReport& report);

}  // namespace angmetric
