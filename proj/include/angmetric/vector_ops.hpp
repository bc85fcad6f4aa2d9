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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "angmetric/error.hpp"

namespace angmetric {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;

inline void require_same_dim(ConstSpan a, ConstSpan b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                       std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  }
}

inline bool all_finite(ConstSpan a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline double dot(ConstSpan a, ConstSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(ConstSpan a) { return dot(a, a); }

inline double norm(ConstSpan a) { return std::sqrt(squared_norm(a)); }

inline double squared_distance(ConstSpan a, ConstSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// y += scale * x
inline void axpy(double scale, ConstSpan x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += scale * x[i];
}

inline double max_abs(ConstSpan a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Degrees to radians, written so that multiples of 45° map onto the
/// correctly rounded fractions of pi.
inline double degrees_to_radians(double degrees) {
  return (degrees / 180.0) * 3.14159265358979323846;
}

/// Tangent of an angle in degrees; exact at 45°.
inline double tan_degrees(double degrees) {
  if (degrees == 45.0) return 1.0;
  return std::tan(degrees_to_radians(degrees));
}

}  // namespace angmetric
