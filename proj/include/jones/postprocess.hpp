// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jones/assembly.hpp"
#include "jones/eigensolve.hpp"
#include "jones/fespace.hpp"
#include "jones/oracle.hpp"

namespace jones {

enum class ModeClass { s_mode, p_mode, mixed, rigid };

inline const char* to_string(ModeClass c) {
  switch (c) {
    case ModeClass::s_mode: return "s";
    case ModeClass::p_mode: return "p";
    case ModeClass::mixed: return "mixed";
    case ModeClass::rigid: return "rigid";
  }
  return "?";
}

/// Elementwise-exact quadrature of the squared divergence, rotation, strain
/// and gradient of a discrete field.
struct ModeEnergies {
  double div2 = 0.0;
  double rot2 = 0.0;
  double strain2 = 0.0;
  double grad2 = 0.0;
};

inline ModeEnergies div_rot_energies(const FunctionSpace& space,
                                     const Eigen::VectorXd& coeffs) {
  const Mesh& mesh = *space.mesh;
  const int nn = nodes_per_cell(space.degree);
  ModeEnergies out;
  static const std::array<double, 3> centroid = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const auto& quad = TriQuadrature::degree4();
  std::array<Eigen::Vector2d, 6> dN;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto& cn = space.cell_nodes[c];
    const int nq = space.degree == 1 ? 1 : static_cast<int>(quad.points.size());
    for (int q = 0; q < nq; ++q) {
      const auto& bc = space.degree == 1 ? centroid : quad.points[q];
      const double w = g.area * (space.degree == 1 ? 1.0 : quad.weights[q]);
      shape_gradients(space.degree, bc, g, dN.data());
      Eigen::Matrix2d gu = Eigen::Matrix2d::Zero();
      for (int a = 0; a < nn; ++a) {
        const double ux = coeffs[space.dof(cn[a], 0)];
        const double uy = coeffs[space.dof(cn[a], 1)];
        gu(0, 0) += ux * dN[a].x();
        gu(0, 1) += ux * dN[a].y();
        gu(1, 0) += uy * dN[a].x();
        gu(1, 1) += uy * dN[a].y();
      }
      const double div = gu(0, 0) + gu(1, 1);
      const double rot = gu(1, 0) - gu(0, 1);
      const Eigen::Matrix2d eps = 0.5 * (gu + gu.transpose());
      out.div2 += w * div * div;
      out.rot2 += w * rot * rot;
      out.strain2 += w * eps.squaredNorm();
      out.grad2 += w * gu.squaredNorm();
    }
  }
  return out;
}

/// s if the divergence energy is negligible against the rotation energy,
/// p for the converse, rigid when both vanish, mixed otherwise.
inline ModeClass classify_mode(double div2, double rot2, double ratio_tol = 1e-3,
                               double abs_floor = 1e-8) {
  if (div2 < 0.0 || rot2 < 0.0)
    throw std::invalid_argument("classify_mode: energies must be nonnegative");
  if (div2 <= abs_floor && rot2 <= abs_floor) return ModeClass::rigid;
  if (div2 <= ratio_tol * rot2) return ModeClass::s_mode;
  if (rot2 <= ratio_tol * div2) return ModeClass::p_mode;
  return ModeClass::mixed;
}

struct SpectrumEntry {
  int j = 0;  // 0 for rigid modes, 1.. ascending otherwise
  double kappa = 0.0;
  double w_squared = 0.0;
  double div2 = 0.0, rot2 = 0.0;
  double strain2 = 0.0, grad2 = 0.0;
  ModeClass cls = ModeClass::mixed;
  int cluster = 0;
  double residual = 0.0;
};

struct SpectrumReport {
  std::string domain_label;
  MaterialParams params;
  double h = 0.0;
  int degree = 1;
  Imposition imposition = Imposition::reduction;
  Formulation formulation = Formulation::grad_div;
  int total_dofs = 0;
  int free_dofs = 0;
  double coercivity_constant = 0.0;
  bool low_coercivity = false;
  std::vector<std::string> warnings;
  std::vector<SpectrumEntry> entries;       // ascending in kappa
  std::vector<Eigen::VectorXd> mode_coeffs; // full-space coefficients per entry

  const SpectrumEntry& at_index(int j) const {
    for (const auto& e : entries)
      if (e.j == j) return e;
    throw std::out_of_range("SpectrumReport: no entry with index " + std::to_string(j));
  }
};

struct ConvergenceRow {
  double h = 0.0;
  double kappa_h = 0.0;
  double error = 0.0;
  double rate = std::numeric_limits<double>::quiet_NaN();  // empty on first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // h strictly decreasing
  double kappa_ref = 0.0;
  std::string reference;  // "analytic" or "fine-grid-P2"
  int target_index = 0;
  double median_rate = std::numeric_limits<double>::quiet_NaN();
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// e_h = |kappa - kappa_h| / |kappa| and r = log(e_h/e_h') / log(h/h') for
/// consecutive rows.
inline ConvergenceTable error_and_rate(
    double kappa_ref, const std::vector<std::pair<double, double>>& runs) {
  if (kappa_ref == 0.0)
    throw std::invalid_argument("error_and_rate: zero reference eigenvalue");
  if (runs.size() < 2)
    throw std::invalid_argument("error_and_rate: need at least two runs");
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (!(runs[i].first < runs[i - 1].first))
      throw std::invalid_argument("error_and_rate: h must decrease strictly");

  ConvergenceTable table;
  table.kappa_ref = kappa_ref;
  std::vector<double> rates;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ConvergenceRow row;
    row.h = runs[i].first;
    row.kappa_h = runs[i].second;
    row.error = std::abs(kappa_ref - row.kappa_h) / std::abs(kappa_ref);
    if (i > 0) {
      const double e0 = table.rows.back().error;
      row.rate = std::log(e0 / row.error) / std::log(runs[i - 1].first / row.h);
      rates.push_back(row.rate);
    }
    table.rows.push_back(row);
  }
  table.median_rate = median_of(rates);
  return table;
}

/// Alignment of an analytic mode with the span of computed eigenvectors:
/// the M-norm of the projection of the M-normalized interpolant onto the
/// (M-orthonormal) span. 1 means the mode lies in the span.
inline double match_to_oracle(const FunctionSpace& space, const SpMat& M_full,
                              const std::vector<Eigen::VectorXd>& cluster_span,
                              const AnalyticMode& mode) {
  if (cluster_span.empty())
    throw std::invalid_argument("match_to_oracle: empty cluster");
  Eigen::VectorXd w = interpolate(
      space, [&](const Point2& p) { return Eigen::Vector2d(mode.eval(p)); });
  const Eigen::VectorXd Mw = M_full * w;
  const double nrm = std::sqrt(w.dot(Mw));
  if (!(nrm > 0.0))
    throw std::invalid_argument("match_to_oracle: interpolant vanishes");
  double s = 0.0;
  for (const auto& v : cluster_span) {
    const double c = v.dot(Mw) / nrm;
    s += c * c;
  }
  return std::min(std::sqrt(s), 1.0);
}

inline double match_to_oracle(const FunctionSpace& space, const SpMat& M_full,
                              const EigenPair& computed, const AnalyticMode& mode) {
  return match_to_oracle(space, M_full, std::vector<Eigen::VectorXd>{computed.coeffs},
                         mode);
}

}  // namespace jones
