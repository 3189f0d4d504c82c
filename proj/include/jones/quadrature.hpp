// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace jones {

/// Triangle rule in barycentric coordinates; weights sum to one, so
/// integral = area * sum_i w_i f(x_i).
struct TriQuadrature {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  /// 3-point midpoint rule, exact for polynomials of degree 2.
  static const TriQuadrature& degree2() {
    static const TriQuadrature q = [] {
      TriQuadrature r;
      r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
      r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      return r;
    }();
    return q;
  }

  /// 6-point rule, exact for polynomials of degree 4.
  static const TriQuadrature& degree4() {
    static const TriQuadrature q = [] {
      const double a = 0.445948490915965;
      const double wa = 0.223381589678011;
      const double b = 0.091576213509771;
      const double wb = 0.109951743655322;
      TriQuadrature r;
      r.points = {{1 - 2 * a, a, a}, {a, 1 - 2 * a, a}, {a, a, 1 - 2 * a},
                  {1 - 2 * b, b, b}, {b, 1 - 2 * b, b}, {b, b, 1 - 2 * b}};
      r.weights = {wa, wa, wa, wb, wb, wb};
      return r;
    }();
    return q;
  }
};

/// Gauss-Legendre rule on [0,1]; weights sum to one.
struct SegmentQuadrature {
  std::vector<double> points;
  std::vector<double> weights;

  /// 3-point rule, exact for polynomials of degree 5.
  static const SegmentQuadrature& degree5() {
    static const SegmentQuadrature q = [] {
      const double s = std::sqrt(3.0 / 5.0);
      SegmentQuadrature r;
      r.points = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
      r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      return r;
    }();
    return q;
  }
};

}  // namespace jones
