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

#include "angmetric/geometry.hpp"

#include <cmath>
#include <string>

namespace angmetric {

Triplet::Triplet(Vector anchor, Vector positive, Vector negative)
    : anchor_(std::move(anchor)),
      positive_(std::move(positive)),
      negative_(std::move(negative)) {
  if (anchor_.empty()) throw InvalidInput("Triplet: dimension must be >= 1");
  require_same_dim(anchor_, positive_, "Triplet");
  require_same_dim(anchor_, negative_, "Triplet");
  if (!all_finite(anchor_) || !all_finite(positive_) ||
      !all_finite(negative_)) {
    throw InvalidInput("Triplet: non-finite component");
  }
}

Vector positive_center(ConstSpan anchor, ConstSpan positive) {
  require_same_dim(anchor, positive, "positive_center");
  if (!all_finite(anchor) || !all_finite(positive)) {
    throw InvalidInput("positive_center: non-finite component");
  }
  Vector c(anchor.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = 0.5 * (anchor[i] + positive[i]);
  }
  return c;
}

TriangleGeometry triangle_geometry(const Triplet& t) {
  TriangleGeometry g;
  g.center = positive_center(t.anchor(), t.positive());
  g.radius = 0.5 * std::sqrt(squared_distance(t.anchor(), t.positive()));
  g.negative_to_center_dist =
      std::sqrt(squared_distance(t.negative(), g.center));
  if (g.negative_to_center_dist > 0.0) {
    g.tan_angle_n_prime = g.radius / g.negative_to_center_dist;
  } else {
    g.tan_angle_n_prime =
        g.radius > 0.0 ? TriangleGeometry::kInfiniteTangent : 0.0;
  }
  return g;
}

bool triplet_constraint_satisfied(const Triplet& t, double margin) {
  if (!(margin >= 0.0) || !std::isfinite(margin)) {
    throw InvalidInput("triplet margin must be finite and >= 0");
  }
  return squared_distance(t.anchor(), t.positive()) + margin <=
         squared_distance(t.anchor(), t.negative());
}

void check_alpha_degrees(double alpha_degrees) {
  if (!(alpha_degrees > 0.0 && alpha_degrees < 90.0)) {
    throw InvalidInput("alpha must lie in (0, 90) degrees, got " +
                       std::to_string(alpha_degrees));
  }
}

bool angular_constraint_satisfied(const Triplet& t, double alpha_degrees) {
  check_alpha_degrees(alpha_degrees);
  const TriangleGeometry g = triangle_geometry(t);
  // 2 * radius == |a - p|; a zero-width triangle passes even when the
  // negative coincides with the centre.
  return 2.0 * g.radius <=
         2.0 * tan_degrees(alpha_degrees) * g.negative_to_center_dist;
}

}  // namespace angmetric
