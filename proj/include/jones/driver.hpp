// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "jones/assembly.hpp"
#include "jones/eigensolve.hpp"
#include "jones/fespace.hpp"
#include "jones/mesh.hpp"
#include "jones/oracle.hpp"
#include "jones/postprocess.hpp"

namespace jones {

struct SolveSettings {
  int degree = 1;
  Imposition imposition = Imposition::reduction;
  Formulation formulation = Formulation::grad_div;
  int k_want = 8;
  double angle_tol = -1.0;   // < 0: 1e-8 on polygons, 0.2 on circle meshes
  double gamma = -1.0;       // < 0: 1e10 * max stiffness diagonal
  double eta = 1e-8;
  double cluster_tol = 1e-3;
  double ratio_tol = 1e-3;
  double solver_tol = -1.0;  // < 0: 1e-7, loosened to 1e-5 for mixed
  int dense_threshold = 4000;
};

namespace detail {

inline double effective_angle_tol(const Mesh& mesh, const SolveSettings& s) {
  if (s.angle_tol >= 0.0) return s.angle_tol;
  return mesh.boundary_kind == BoundaryKind::circle ? 0.2 : 1e-8;
}

}  // namespace detail

/// End-to-end solve: space, boundary classification, assembly, imposition,
/// eigensolve and mode diagnostics. Eigenvalues are reported as
/// kappa = rho w^2; rigid modes (kappa ~ 0) receive index 0.
inline SpectrumReport solve_jones(const Mesh& mesh, const MaterialParams& params,
                                  const SolveSettings& settings) {
  params.validate();
  SpectrumReport report;
  report.params = params;
  report.h = mesh.h;
  report.degree = settings.degree;
  report.imposition = settings.imposition;
  report.formulation = settings.formulation;
  report.coercivity_constant = params.coercivity_constant();
  report.low_coercivity = params.low_coercivity();
  if (report.low_coercivity)
    report.warnings.push_back(
        "near-zero coercivity constant " + std::to_string(report.coercivity_constant) +
        "; eigenfunction quality degrades (tiny shear or near-degenerate Lame pair)");

  const FunctionSpace space = build_space(mesh, settings.degree);
  report.total_dofs = space.total_dofs;
  const double angle_tol = detail::effective_angle_tol(mesh, settings);
  const auto classes = classify_boundary_nodes(space, angle_tol);

  const double solver_tol =
      settings.solver_tol >= 0.0
          ? settings.solver_tol
          : (settings.imposition == Imposition::mixed ? 1e-5 : 1e-7);

  if (mesh.boundary_kind == BoundaryKind::circle &&
      settings.imposition == Imposition::reduction &&
      angle_tol < 2.0 * M_PI / static_cast<double>(mesh.boundary_edges.size()))
    report.warnings.push_back(
        "reduction imposition pins every polygon corner at this angle tolerance; "
        "the rotation mode of the axisymmetric domain is locked");

  std::vector<EigenPair> pairs;
  SpMat M_full;
  switch (settings.imposition) {
    case Imposition::reduction: {
      const auto op = build_constraint_operator(space, classes);
      report.free_dofs = op.free_dofs;
      if (op.free_dofs == 0) {
        report.warnings.push_back("fully constrained space: empty spectrum");
        return report;
      }
      auto [K, M] = assemble_form(space, params, settings.formulation);
      M_full = M;
      const SymmetricSystem sys =
          reduce_system(K, M, op, settings.formulation);
      const int kw = std::min(settings.k_want, op.free_dofs);
      pairs = solve_gevp(sys, kw, solver_tol, settings.dense_threshold);
      for (auto& p : pairs) {
        p.coeffs = (op.Z * p.coeffs).eval();
        canonical_sign(p.coeffs);
      }
      break;
    }
    case Imposition::penalty: {
      auto [K, M] = assemble_form(space, params, settings.formulation);
      M_full = M;
      double gamma = settings.gamma;
      if (gamma < 0.0) {
        double maxdiag = 0.0;
        for (int i = 0; i < K.rows(); ++i)
          maxdiag = std::max(maxdiag, std::abs(K.coeff(i, i)));
        gamma = 1e10 * maxdiag;
      }
      report.free_dofs = space.total_dofs;
      const SymmetricSystem sys =
          assemble_penalty(K, M, classes, gamma, settings.formulation);
      const int kw = std::min(settings.k_want, space.total_dofs);
      pairs = solve_gevp(sys, kw, solver_tol, settings.dense_threshold);
      break;
    }
    case Imposition::mixed: {
      const ScalarSpace scalar = build_scalar_space(mesh);
      const SaddleSystem saddle =
          assemble_mixed(space, scalar, params, settings.eta);
      M_full = saddle.M_u;
      report.free_dofs = saddle.n_u;
      const int kw = std::min(settings.k_want, saddle.n_u);
      pairs = solve_saddle(saddle, kw, solver_tol, settings.dense_threshold);
      break;
    }
  }

  // The shifted form solves abar = a + rho (u,v)0, so its eigenvalues sit
  // rho above the plain ones.
  if (settings.formulation == Formulation::shifted)
    for (auto& p : pairs) p.kappa -= params.rho;

  const auto clusters = cluster_eigenvalues(pairs, settings.cluster_tol);
  std::vector<int> cluster_of(pairs.size(), 0);
  for (int ci = 0; ci < static_cast<int>(clusters.size()); ++ci)
    for (int m : clusters[ci].members) cluster_of[m] = ci;

  double kappa_max = 0.0;
  for (const auto& p : pairs) kappa_max = std::max(kappa_max, std::abs(p.kappa));
  const double rigid_floor = 1e-5 * std::max(1.0, kappa_max);

  int j = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    SpectrumEntry e;
    e.kappa = pairs[i].kappa;
    e.w_squared = pairs[i].kappa / params.rho;
    e.residual = pairs[i].residual;
    e.cluster = cluster_of[i];
    const ModeEnergies en = div_rot_energies(space, pairs[i].coeffs);
    e.div2 = en.div2;
    e.rot2 = en.rot2;
    e.strain2 = en.strain2;
    e.grad2 = en.grad2;
    if (std::abs(e.kappa) <= rigid_floor) {
      e.cls = ModeClass::rigid;
      e.j = 0;
    } else {
      e.cls = classify_mode(e.div2, e.rot2, settings.ratio_tol);
      e.j = j++;
    }
    report.entries.push_back(e);
    report.mode_coeffs.push_back(pairs[i].coeffs);
  }
  return report;
}

inline SpectrumReport solve_jones(const DomainSpec& domain,
                                  const MaterialParams& params,
                                  const SolveSettings& settings) {
  const Mesh mesh = build_mesh(domain);
  SpectrumReport report = solve_jones(mesh, params, settings);
  return report;
}

/// Nested-refinement study of one tracked eigenvalue. Rectangle-family
/// domains are referenced against the closed-form spectrum; everything else
/// against a P2 solve two refinements beyond the finest level.
inline ConvergenceTable convergence_study(const DomainSpec& domain,
                                          const MaterialParams& params,
                                          int levels, int target_index,
                                          SolveSettings settings) {
  if (levels < 3)
    throw std::invalid_argument("convergence_study: need at least 3 levels");
  if (target_index < 1)
    throw std::invalid_argument("convergence_study: target index must be >= 1");
  settings.k_want = std::max(settings.k_want, target_index + 4);

  std::vector<Mesh> meshes;
  meshes.push_back(build_mesh(domain));
  for (int l = 1; l < levels; ++l) meshes.push_back(refine_uniform(meshes.back()));

  std::vector<std::pair<double, double>> runs;
  for (const auto& mesh : meshes) {
    const SpectrumReport rep = solve_jones(mesh, params, settings);
    runs.emplace_back(mesh.h, rep.at_index(target_index).kappa);
  }

  double kappa_ref = 0.0;
  std::string provenance;
  if (domain.rectangle_family()) {
    const auto [a, b] = domain.rect_sides();
    const auto spectrum = rectangle_spectrum(a, b, params, target_index);
    kappa_ref = spectrum[target_index - 1].kappa;
    provenance = "analytic";
  } else {
    Mesh ref_mesh = refine_uniform(refine_uniform(meshes.back()));
    SolveSettings ref_settings = settings;
    ref_settings.degree = 2;
    const SpectrumReport rep = solve_jones(ref_mesh, params, ref_settings);
    kappa_ref = rep.at_index(target_index).kappa;
    provenance = "fine-grid-P2";
  }

  ConvergenceTable table = error_and_rate(kappa_ref, runs);
  table.reference = provenance;
  table.target_index = target_index;
  return table;
}

}  // namespace jones
