// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jones/fespace.hpp"
#include "jones/material.hpp"
#include "jones/mesh.hpp"
#include "jones/quadrature.hpp"

namespace jones {

using SpMat = Eigen::SparseMatrix<double>;

enum class Formulation { grad_div, strain, shifted };
enum class Imposition { reduction, penalty, mixed };

inline const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::grad_div: return "graddiv";
    case Formulation::strain: return "strain";
    case Formulation::shifted: return "shifted";
  }
  return "?";
}
inline const char* to_string(Imposition i) {
  switch (i) {
    case Imposition::reduction: return "reduce";
    case Imposition::penalty: return "penalty";
    case Imposition::mixed: return "mixed";
  }
  return "?";
}

/// Stiffness and mass pair on the free degrees of freedom.
struct SymmetricSystem {
  SpMat K, M;
  Formulation formulation = Formulation::grad_div;
  Imposition imposition = Imposition::reduction;
};

/// Blocks of the mixed (Lagrange-multiplier) formulation:
///   [A  B^T] [u]       [M_u 0] [u]
///   [B -eta*C] [p] = kappa [0  0] [p].
struct SaddleSystem {
  SpMat A;    // strain-form stiffness on the unconstrained vector space
  SpMat B;    // boundary pairing <u.n, q>, n_p x n_u
  SpMat C;    // full-domain scalar mass
  SpMat M_u;  // vector mass
  double eta = 0.0;
  int n_u = 0, n_p = 0;
};

namespace detail {

/// Stiffness integrand for one shape-gradient pair and component pair.
inline double stiffness_entry(Formulation f, const MaterialParams& mp,
                              const Eigen::Vector2d& ga, const Eigen::Vector2d& gb,
                              int c, int d) {
  const double gg = ga.dot(gb);
  switch (f) {
    case Formulation::grad_div:
    case Formulation::shifted:
      return mp.mu * (c == d ? gg : 0.0) + (mp.lambda + mp.mu) * ga[c] * gb[d];
    case Formulation::strain:
      return mp.mu * (c == d ? gg : 0.0) + mp.mu * ga[d] * gb[c] +
             mp.lambda * ga[c] * gb[d];
  }
  return 0.0;
}

}  // namespace detail

/// Local stiffness and mass of one cell. P1 blocks are integrated in closed
/// form (constant gradients, exact mass); P2 uses the 6-point degree-4 rule,
/// which is exact for every integrand that appears here.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> element_matrices(
    const std::array<Point2, 3>& tri, int degree, const MaterialParams& params,
    Formulation formulation) {
  const CellGeometry g = cell_geometry(tri);
  if (!(g.area > 0.0))
    throw std::invalid_argument("element_matrices: degenerate or inverted cell");
  const int nn = nodes_per_cell(degree);
  const int ld = 2 * nn;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ld, ld);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ld, ld);

  if (degree == 1) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d)
            K(2 * a + c, 2 * b + d) =
                g.area * detail::stiffness_entry(formulation, params,
                                                 g.grad_lambda[a],
                                                 g.grad_lambda[b], c, d);
        const double mab = g.area / 12.0 * (a == b ? 2.0 : 1.0);
        M(2 * a, 2 * b) = mab;
        M(2 * a + 1, 2 * b + 1) = mab;
      }
  } else {
    const auto& quad = TriQuadrature::degree4();
    std::array<double, 6> N;
    std::array<Eigen::Vector2d, 6> dN;
    for (std::size_t q = 0; q < quad.points.size(); ++q) {
      const double w = g.area * quad.weights[q];
      shape_values(degree, quad.points[q], N.data());
      shape_gradients(degree, quad.points[q], g, dN.data());
      for (int a = 0; a < nn; ++a)
        for (int b = 0; b < nn; ++b) {
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              K(2 * a + c, 2 * b + d) +=
                  w * detail::stiffness_entry(formulation, params, dN[a], dN[b], c, d);
          const double mab = w * N[a] * N[b];
          M(2 * a, 2 * b) += mab;
          M(2 * a + 1, 2 * b + 1) += mab;
        }
    }
  }

  if (formulation == Formulation::shifted) K += params.rho * M;
  // Exact structural symmetry for the global scatter.
  K = 0.5 * (K + K.transpose()).eval();
  return {K, M};
}

/// Assembles the chosen bilinear form and the plain L2 vector mass (the mass
/// carries no density factor; eigenvalues are kappa = rho w^2).
inline std::pair<SpMat, SpMat> assemble_form(const FunctionSpace& space,
                                             const MaterialParams& params,
                                             Formulation formulation) {
  params.validate();
  const Mesh& mesh = *space.mesh;
  const int nn = nodes_per_cell(space.degree);
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(mesh.num_cells() * 4 * nn * nn);
  mt.reserve(mesh.num_cells() * 2 * nn * nn);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto [K, M] = element_matrices({mesh.vertices[mesh.cells[c][0]],
                                          mesh.vertices[mesh.cells[c][1]],
                                          mesh.vertices[mesh.cells[c][2]]},
                                         space.degree, params, formulation);
    const auto& cn = space.cell_nodes[c];
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        for (int cc = 0; cc < 2; ++cc)
          for (int dd = 0; dd < 2; ++dd) {
            const int I = space.dof(cn[a], cc);
            const int J = space.dof(cn[b], dd);
            const double kv = K(2 * a + cc, 2 * b + dd);
            if (kv != 0.0) kt.emplace_back(I, J, kv);
            const double mv = M(2 * a + cc, 2 * b + dd);
            if (mv != 0.0) mt.emplace_back(I, J, mv);
          }
  }
  SpMat Kg(space.total_dofs, space.total_dofs);
  SpMat Mg(space.total_dofs, space.total_dofs);
  Kg.setFromTriplets(kt.begin(), kt.end());
  Mg.setFromTriplets(mt.begin(), mt.end());
  return {Kg, Mg};
}

/// Largest absolute deviation from symmetry (0 for all assembled matrices).
inline double symmetry_defect(const SpMat& A) {
  SpMat D = SpMat(A.transpose()) - A;
  double defect = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMat::InnerIterator it(D, k); it; ++it)
      defect = std::max(defect, std::abs(it.value()));
  return defect;
}

/// Galerkin reduction onto the constrained space: K = Z^T K_full Z, etc.
/// Fails if the reduced mass is not positive definite, which signals a
/// broken constraint operator.
inline SymmetricSystem reduce_system(const SpMat& K_full, const SpMat& M_full,
                                     const ConstraintOperator& op,
                                     Formulation formulation) {
  if (K_full.rows() != op.Z.rows())
    throw std::invalid_argument("reduce_system: incompatible dimensions");
  SymmetricSystem sys;
  sys.formulation = formulation;
  sys.imposition = Imposition::reduction;
  const SpMat Zt = op.Z.transpose();
  sys.K = Zt * K_full * op.Z;
  sys.M = Zt * M_full * op.Z;
  if (sys.M.rows() > 0) {
    Eigen::SimplicialLLT<SpMat> llt(sys.M);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("reduce_system: reduced mass not positive definite");
  }
  return sys;
}

/// Penalty imposition: K + gamma * (n n^T at slip nodes, identity at pinned
/// nodes) on the full space; the mass is untouched.
inline SymmetricSystem assemble_penalty(const SpMat& K_full, const SpMat& M_full,
                                        const std::vector<BoundaryNodeClass>& classes,
                                        double gamma, Formulation formulation) {
  if (gamma < 0.0)
    throw std::invalid_argument("assemble_penalty: gamma must be >= 0");
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& cls : classes) {
    const int i = cls.node;
    if (cls.cls == NodeClass::slip) {
      const Eigen::Vector2d n = cls.normal;
      trip.emplace_back(2 * i, 2 * i, gamma * n.x() * n.x());
      trip.emplace_back(2 * i, 2 * i + 1, gamma * n.x() * n.y());
      trip.emplace_back(2 * i + 1, 2 * i, gamma * n.x() * n.y());
      trip.emplace_back(2 * i + 1, 2 * i + 1, gamma * n.y() * n.y());
    } else if (cls.cls == NodeClass::pinned) {
      trip.emplace_back(2 * i, 2 * i, gamma);
      trip.emplace_back(2 * i + 1, 2 * i + 1, gamma);
    }
  }
  SpMat P(K_full.rows(), K_full.cols());
  P.setFromTriplets(trip.begin(), trip.end());
  SymmetricSystem sys;
  sys.formulation = formulation;
  sys.imposition = Imposition::penalty;
  sys.K = K_full + P;
  sys.M = M_full;
  return sys;
}

/// Mixed formulation blocks. The duality pairing <u.n, q> is realized as the
/// L2 boundary pairing over the piecewise-straight boundary; the multiplier
/// is scalar P1 on the whole domain, so C is the full-domain scalar mass.
inline SaddleSystem assemble_mixed(const FunctionSpace& space_u,
                                   const ScalarSpace& space_p,
                                   const MaterialParams& params, double eta) {
  if (eta < 0.0) throw std::invalid_argument("assemble_mixed: eta must be >= 0");
  if (space_u.mesh != space_p.mesh)
    throw std::invalid_argument("assemble_mixed: spaces on different meshes");
  params.validate();
  const Mesh& mesh = *space_u.mesh;

  SaddleSystem sys;
  sys.eta = eta;
  sys.n_u = space_u.total_dofs;
  sys.n_p = space_p.num_dofs;
  auto [A, Mu] = assemble_form(space_u, params, Formulation::strain);
  sys.A = std::move(A);
  sys.M_u = std::move(Mu);

  // Scalar P1 mass on the whole domain.
  std::vector<Eigen::Triplet<double>> ct;
  ct.reserve(9 * mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double area = mesh.signed_area(c);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        ct.emplace_back(mesh.cells[c][a], mesh.cells[c][b],
                        area / 12.0 * (a == b ? 2.0 : 1.0));
  }
  sys.C.resize(sys.n_p, sys.n_p);
  sys.C.setFromTriplets(ct.begin(), ct.end());

  // Boundary pairing B[q, (node,comp)] = int_e (phi_u n_comp) psi_q ds.
  const auto& quad = SegmentQuadrature::degree5();
  std::vector<Eigen::Triplet<double>> bt;
  std::unordered_map<std::uint64_t, int> edge_node;
  if (space_u.degree == 2) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      const auto& cn = space_u.cell_nodes[c];
      edge_node[detail::edge_key(cell[0], cell[1])] = cn[3];
      edge_node[detail::edge_key(cell[1], cell[2])] = cn[4];
      edge_node[detail::edge_key(cell[2], cell[0])] = cn[5];
    }
  }
  for (const auto& be : mesh.boundary_edges) {
    const Point2 pa = mesh.vertices[be.a];
    const Point2 pb = mesh.vertices[be.b];
    const double len = (pb - pa).norm();
    // u-trace nodes along the edge with their 1D shape functions.
    std::vector<int> unodes = {be.a, be.b};
    if (space_u.degree == 2)
      unodes.push_back(edge_node.at(detail::edge_key(be.a, be.b)));
    for (std::size_t q = 0; q < quad.points.size(); ++q) {
      const double t = quad.points[q];
      const double w = len * quad.weights[q];
      std::array<double, 3> Nu;
      if (space_u.degree == 1) {
        Nu = {1.0 - t, t, 0.0};
      } else {
        Nu = {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
      }
      const std::array<double, 2> Np = {1.0 - t, t};
      const std::array<int, 2> pnodes = {be.a, be.b};
      for (std::size_t iu = 0; iu < unodes.size(); ++iu)
        for (int ip = 0; ip < 2; ++ip)
          for (int comp = 0; comp < 2; ++comp)
            bt.emplace_back(pnodes[ip], space_u.dof(unodes[iu], comp),
                            w * be.normal[comp] * Nu[iu] * Np[ip]);
    }
  }
  sys.B.resize(sys.n_p, sys.n_u);
  sys.B.setFromTriplets(bt.begin(), bt.end());
  return sys;
}

}  // namespace jones
