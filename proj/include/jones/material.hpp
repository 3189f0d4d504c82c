// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <stdexcept>

namespace jones {

/// Isotropic Lame parameters with density. Admissible whenever mu > 0,
/// rho > 0 and lambda + (2/n) mu > 0.
struct MaterialParams {
  double mu = 1.0;
  double lambda = 1.0;
  double rho = 1.0;
  int dim = 2;

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("MaterialParams: mu must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("MaterialParams: rho must be > 0");
    if (dim != 2 && dim != 3)
      throw std::invalid_argument("MaterialParams: dim must be 2 or 3");
    if (!(lambda + (2.0 / dim) * mu > 0.0))
      throw std::invalid_argument("MaterialParams: lambda + (2/n) mu must be > 0");
  }

  /// min{2 mu, n (lambda + 2 mu / n)}: the material factor in the coercivity
  /// bound of the strain form.
  double coercivity_constant() const {
    return std::min(2.0 * mu, dim * (lambda + 2.0 * mu / dim));
  }

  /// True when the two coercivity branches are badly imbalanced, which makes
  /// the discrete eigenproblem ill-conditioned (tiny shear or near-violated
  /// Lame admissibility).
  bool low_coercivity() const {
    const double lo = coercivity_constant();
    const double hi = std::max(2.0 * mu, dim * (lambda + 2.0 * mu / dim));
    return lo < 1e-3 * hi;
  }
};

}  // namespace jones
