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

#include <limits>

#include "angmetric/vector_ops.hpp"

namespace angmetric {

/// Anchor / positive / negative triple. The constructor enforces equal,
/// nonzero dimension and finite components.
class Triplet {
 public:
  Triplet(Vector anchor, Vector positive, Vector negative);

  const Vector& anchor() const { return anchor_; }
  const Vector& positive() const { return positive_; }
  const Vector& negative() const { return negative_; }
  std::size_t dim() const { return anchor_.size(); }

 private:
  Vector anchor_;
  Vector positive_;
  Vector negative_;
};

/// Geometry of the triangle rebuilt around the anchor/positive midpoint.
///
/// The anchor/positive edge is replaced by a circle centred at their
/// midpoint; the angle at the negative vertex between the centre and a
/// point on that circle (orthogonal to the negative-centre edge) has
/// tangent radius / |negative - center|.
struct TriangleGeometry {
  Vector center;
  double radius = 0.0;
  double negative_to_center_dist = 0.0;
  /// +infinity when the negative sits on the centre and radius > 0.
  double tan_angle_n_prime = 0.0;

  static constexpr double kInfiniteTangent =
      std::numeric_limits<double>::infinity();
};

Vector positive_center(ConstSpan anchor, ConstSpan positive);

TriangleGeometry triangle_geometry(const Triplet& t);

/// |a - p|^2 + margin <= |a - n|^2
bool triplet_constraint_satisfied(const Triplet& t, double margin);

/// |a - p| <= 2 tan(alpha) |n - c|, alpha in degrees, 0 < alpha < 90.
bool angular_constraint_satisfied(const Triplet& t, double alpha_degrees);

/// Throws InvalidInput unless 0 < alpha_degrees < 90.
void check_alpha_degrees(double alpha_degrees);

}  // namespace angmetric
