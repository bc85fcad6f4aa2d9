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

#include "angmetric/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "angmetric/rng.hpp"

namespace angmetric {
namespace {

constexpr int kRestarts = 10;
constexpr int kMaxIterations = 300;
constexpr double kCentroidTolerance = 1e-6;

void check_partitions(std::span<const Label> predicted,
                      std::span<const Label> truth, std::size_t min_len) {
  if (predicted.size() != truth.size()) {
    throw InvalidInput("partition lengths differ: " +
                       std::to_string(predicted.size()) + " vs " +
                       std::to_string(truth.size()));
  }
  if (predicted.size() < min_len) {
    throw InvalidInput("partitions need at least " + std::to_string(min_len) +
                       " samples");
  }
}

struct Contingency {
  std::map<std::pair<Label, Label>, std::size_t> cells;
  std::map<Label, std::size_t> predicted;
  std::map<Label, std::size_t> truth;
};

Contingency contingency(std::span<const Label> predicted,
                        std::span<const Label> truth) {
  Contingency c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++c.cells[{predicted[i], truth[i]}];
    ++c.predicted[predicted[i]];
    ++c.truth[truth[i]];
  }
  return c;
}

double entropy(const std::map<Label, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double pairs_of(std::size_t c) {
  return 0.5 * static_cast<double>(c) * static_cast<double>(c - (c > 0));
}

std::size_t nearest_centroid(const Vector& x, const std::vector<Vector>& cs,
                             double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const double d = squared_distance(x, cs[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

std::vector<Vector> kmeans_pp_seed(std::span<const Vector> points,
                                   std::size_t k, Rng& rng) {
  std::vector<Vector> centers;
  centers.push_back(points[rng.uniform_index(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    d2[i] = squared_distance(points[i], centers[0]);
  }
  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(points.size());
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

KMeansResult lloyd(std::span<const Vector> points, std::size_t k, Rng& rng) {
  std::vector<Vector> centers = kmeans_pp_seed(points, k, rng);
  const std::size_t dim = points.front().size();
  std::vector<std::size_t> assign(points.size(), 0);
  std::vector<double> dist(points.size(), 0.0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      assign[i] = nearest_centroid(points[i], centers, &dist[i]);
    }
    std::vector<Vector> next(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      axpy(1.0, points[i], next[assign[i]]);
      ++counts[assign[i]];
    }
    std::vector<bool> taken(points.size(), false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (double& v : next[c]) v /= static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it onto the point worst served by its centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = true;
      next[c] = points[far];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(next[c], centers[c])));
    }
    centers = std::move(next);
    if (shift < kCentroidTolerance) break;
  }
  KMeansResult out;
  out.assignments.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = 0.0;
    out.assignments[i] =
        static_cast<Label>(nearest_centroid(points[i], centers, &d));
    out.inertia += d;
  }
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> split_by_class(
    const LabeledDataset& data, double train_fraction_of_classes,
    std::uint64_t seed) {
  const std::size_t k = data.num_classes();
  if (k < 2) throw InvalidInput("split_by_class: need at least 2 classes");
  if (!(train_fraction_of_classes > 0.0 && train_fraction_of_classes < 1.0)) {
    throw InvalidInput("split_by_class: fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction_of_classes * static_cast<double>(k)));
  if (n_train == 0 || n_train == k) {
    throw InvalidInput("split_by_class: fraction leaves one side empty");
  }
  std::vector<Label> classes;
  for (const auto& [label, _] : data.class_index()) classes.push_back(label);
  Rng rng(seed);
  for (std::size_t i = classes.size() - 1; i > 0; --i) {
    std::swap(classes[i], classes[rng.uniform_index(i + 1)]);
  }
  const std::set<Label> train_classes(classes.begin(),
                                      classes.begin() + n_train);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (train_classes.count(data.label(i)) ? train_rows : test_rows).push_back(i);
  }
  return {data.subset(train_rows), data.subset(test_rows)};
}

std::map<std::size_t, double> recall_at_r(
    std::span<const Vector> embeddings, std::span<const Label> labels,
    std::span<const std::size_t> r_values) {
  const std::size_t n = embeddings.size();
  if (labels.size() != n) {
    throw InvalidInput("recall_at_r: label count does not match embeddings");
  }
  if (n < 2) throw InvalidInput("recall_at_r: need at least 2 samples");
  if (r_values.empty()) throw InvalidInput("recall_at_r: no R values given");
  std::size_t r_max = 0;
  for (std::size_t r : r_values) {
    if (r == 0 || r >= n) {
      throw InvalidInput("recall_at_r: R must lie in [1, " +
                         std::to_string(n - 1) + "], got " + std::to_string(r));
    }
    r_max = std::max(r_max, r);
  }
  for (const auto& e : embeddings) require_same_dim(embeddings[0], e, "recall_at_r");

  // first_hit[i] = rank of the nearest same-label neighbour within the
  // top r_max, or r_max if none.
  std::vector<std::size_t> first_hit(n, r_max);
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n - 1);
  for (std::size_t q = 0; q < n; ++q) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != q) cand.emplace_back(squared_distance(embeddings[q], embeddings[j]), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + r_max, cand.end());
    for (std::size_t rank = 0; rank < r_max; ++rank) {
      if (labels[cand[rank].second] == labels[q]) {
        first_hit[q] = rank;
        break;
      }
    }
  }
  std::map<std::size_t, double> out;
  for (std::size_t r : r_values) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q < n; ++q) hits += first_hit[q] < r;
    out[r] = static_cast<double>(hits) / static_cast<double>(n);
  }
  return out;
}

KMeansResult kmeans(std::span<const Vector> points, std::size_t k,
                    std::uint64_t seed) {
  if (k == 0) throw InvalidInput("kmeans: k must be >= 1");
  if (k > points.size()) {
    throw InvalidInput("kmeans: k = " + std::to_string(k) + " exceeds " +
                       std::to_string(points.size()) + " points");
  }
  for (const auto& p : points) require_same_dim(points[0], p, "kmeans");
  KMeansResult best;
  for (int r = 0; r < kRestarts; ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    KMeansResult run = lloyd(points, k, rng);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

double nmi(std::span<const Label> predicted, std::span<const Label> truth) {
  check_partitions(predicted, truth, 1);
  const Contingency c = contingency(predicted, truth);
  const double n = static_cast<double>(predicted.size());
  const double hu = entropy(c.predicted, n);
  const double hv = entropy(c.truth, n);
  if (c.predicted.size() == 1 && c.truth.size() == 1) return 1.0;
  double mi = 0.0;
  for (const auto& [key, count] : c.cells) {
    const double nij = static_cast<double>(count);
    const double a = static_cast<double>(c.predicted.at(key.first));
    const double b = static_cast<double>(c.truth.at(key.second));
    mi += (nij / n) * std::log(n * nij / (a * b));
  }
  const double denom = 0.5 * (hu + hv);
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double pairwise_f1(std::span<const Label> predicted,
                   std::span<const Label> truth) {
  check_partitions(predicted, truth, 2);
  const Contingency c = contingency(predicted, truth);
  double tp = 0.0, predicted_pos = 0.0, actual_pos = 0.0;
  for (const auto& [_, count] : c.cells) tp += pairs_of(count);
  for (const auto& [_, count] : c.predicted) predicted_pos += pairs_of(count);
  for (const auto& [_, count] : c.truth) actual_pos += pairs_of(count);
  // Both partitions all-singleton: they agree on every pair.
  if (predicted_pos == 0.0 && actual_pos == 0.0) return 1.0;
  const double precision = predicted_pos > 0.0 ? tp / predicted_pos : 0.0;
  const double recall = actual_pos > 0.0 ? tp / actual_pos : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

MetricReport evaluate_embeddings(std::span<const Vector> embeddings,
                                 std::span<const Label> labels,
                                 std::span<const std::size_t> r_values,
                                 std::optional<std::size_t> k,
                                 std::uint64_t seed) {
  MetricReport report;
  report.recall_at = recall_at_r(embeddings, labels, r_values);
  report.num_queries = embeddings.size();
  report.k_used =
      k ? *k : std::set<Label>(labels.begin(), labels.end()).size();
  const KMeansResult clusters = kmeans(embeddings, report.k_used, seed);
  report.nmi = nmi(clusters.assignments, labels);
  report.f1 = pairwise_f1(clusters.assignments, labels);
  return report;
}

std::string format_report(const MetricReport& report) {
  std::string out = "# queries=" + std::to_string(report.num_queries) +
                    " k=" + std::to_string(report.k_used) +
                    " normalize_output=";
  if (report.normalize_output) {
    out += *report.normalize_output ? "1" : "0";
  } else {
    out += "unknown";
  }
  out += '\n';
  for (const auto& [r, v] : report.recall_at) {
    out += "recall@" + std::to_string(r) + '\t' + fixed6(v) + '\n';
  }
  out += "nmi\t" + fixed6(report.nmi) + '\n';
  out += "f1\t" + fixed6(report.f1) + '\n';
  return out;
}

}  // namespace angmetric
