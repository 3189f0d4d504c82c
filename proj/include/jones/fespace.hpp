// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "jones/mesh.hpp"

namespace jones {

/// Affine cell geometry: area and barycentric-coordinate gradients.
struct CellGeometry {
  std::array<Point2, 3> p;
  double area = 0.0;
  std::array<Eigen::Vector2d, 3> grad_lambda;
};

inline CellGeometry cell_geometry(const std::array<Point2, 3>& p) {
  CellGeometry g;
  g.p = p;
  g.area = 0.5 * ((p[1].x() - p[0].x()) * (p[2].y() - p[0].y()) -
                  (p[2].x() - p[0].x()) * (p[1].y() - p[0].y()));
  for (int i = 0; i < 3; ++i) {
    const Point2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
    g.grad_lambda[i] = Eigen::Vector2d(-e.y(), e.x()) / (2.0 * g.area);
  }
  return g;
}

inline CellGeometry cell_geometry(const Mesh& mesh, int c) {
  return cell_geometry({mesh.vertices[mesh.cells[c][0]],
                        mesh.vertices[mesh.cells[c][1]],
                        mesh.vertices[mesh.cells[c][2]]});
}

inline int nodes_per_cell(int degree) { return degree == 1 ? 3 : 6; }

/// Lagrange shape values at a barycentric point. N must hold 3 (P1) or 6 (P2).
inline void shape_values(int degree, const std::array<double, 3>& bc, double* N) {
  const double l0 = bc[0], l1 = bc[1], l2 = bc[2];
  if (degree == 1) {
    N[0] = l0;
    N[1] = l1;
    N[2] = l2;
    return;
  }
  N[0] = l0 * (2.0 * l0 - 1.0);
  N[1] = l1 * (2.0 * l1 - 1.0);
  N[2] = l2 * (2.0 * l2 - 1.0);
  N[3] = 4.0 * l0 * l1;
  N[4] = 4.0 * l1 * l2;
  N[5] = 4.0 * l2 * l0;
}

/// Physical-space shape gradients at a barycentric point.
inline void shape_gradients(int degree, const std::array<double, 3>& bc,
                            const CellGeometry& g, Eigen::Vector2d* dN) {
  const auto& gl = g.grad_lambda;
  if (degree == 1) {
    dN[0] = gl[0];
    dN[1] = gl[1];
    dN[2] = gl[2];
    return;
  }
  for (int i = 0; i < 3; ++i) dN[i] = (4.0 * bc[i] - 1.0) * gl[i];
  dN[3] = 4.0 * (bc[1] * gl[0] + bc[0] * gl[1]);
  dN[4] = 4.0 * (bc[2] * gl[1] + bc[1] * gl[2]);
  dN[5] = 4.0 * (bc[0] * gl[2] + bc[2] * gl[0]);
}

/// Vector Lagrange space of degree k in {1,2}: two displacement components
/// per scalar node, nodes ordered vertices first, then edge midpoints.
struct FunctionSpace {
  const Mesh* mesh = nullptr;
  int degree = 1;
  std::vector<Point2> nodes;
  std::vector<std::array<int, 6>> cell_nodes;  // first 3 used when degree == 1
  int num_nodes = 0;
  int total_dofs = 0;

  // Boundary adjacency per scalar node: outward normals of the touching
  // boundary edges (two for boundary vertices, one for midpoint nodes).
  std::vector<std::vector<Eigen::Vector2d>> boundary_normals;
  std::vector<bool> is_midpoint_node;

  int dof(int node, int comp) const { return 2 * node + comp; }
};

inline FunctionSpace build_space(const Mesh& mesh, int degree) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("build_space: degree must be 1 or 2");
  FunctionSpace space;
  space.mesh = &mesh;
  space.degree = degree;
  space.nodes = mesh.vertices;
  space.cell_nodes.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    space.cell_nodes[c] = {cell[0], cell[1], cell[2], -1, -1, -1};
  }

  std::unordered_map<std::uint64_t, int> edge_node;
  if (degree == 2) {
    // Stable midpoint numbering: sorted unique edges, in order.
    std::vector<std::uint64_t> keys;
    keys.reserve(3 * mesh.num_cells());
    for (const auto& cell : mesh.cells)
      for (int e = 0; e < 3; ++e)
        keys.push_back(detail::edge_key(cell[e], cell[(e + 1) % 3]));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto key : keys) {
      const int a = static_cast<int>(key >> 32);
      const int b = static_cast<int>(key & 0xffffffffu);
      edge_node.emplace(key, static_cast<int>(space.nodes.size()));
      space.nodes.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      space.cell_nodes[c][3] = edge_node.at(detail::edge_key(cell[0], cell[1]));
      space.cell_nodes[c][4] = edge_node.at(detail::edge_key(cell[1], cell[2]));
      space.cell_nodes[c][5] = edge_node.at(detail::edge_key(cell[2], cell[0]));
    }
  }

  space.num_nodes = static_cast<int>(space.nodes.size());
  space.total_dofs = 2 * space.num_nodes;
  space.boundary_normals.resize(space.num_nodes);
  space.is_midpoint_node.assign(space.num_nodes, false);
  for (int i = mesh.num_vertices(); i < space.num_nodes; ++i)
    space.is_midpoint_node[i] = true;

  for (const auto& be : mesh.boundary_edges) {
    space.boundary_normals[be.a].push_back(be.normal);
    space.boundary_normals[be.b].push_back(be.normal);
    if (degree == 2)
      space.boundary_normals[edge_node.at(detail::edge_key(be.a, be.b))]
          .push_back(be.normal);
  }
  return space;
}

enum class NodeClass { interior, slip, pinned };

struct BoundaryNodeClass {
  int node = -1;
  NodeClass cls = NodeClass::interior;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();  // set for slip nodes
};

/// Classifies every scalar node. A boundary vertex whose two touching edge
/// normals differ by at most angle_tol becomes slip with the averaged
/// normal; otherwise it is pinned (a corner). Midpoint nodes are slip with
/// their edge normal.
inline std::vector<BoundaryNodeClass> classify_boundary_nodes(
    const FunctionSpace& space, double angle_tol) {
  std::vector<BoundaryNodeClass> classes(space.num_nodes);
  for (int i = 0; i < space.num_nodes; ++i) {
    classes[i].node = i;
    const auto& normals = space.boundary_normals[i];
    if (normals.empty()) continue;
    if (space.is_midpoint_node[i]) {
      classes[i].cls = NodeClass::slip;
      classes[i].normal = normals[0];
      continue;
    }
    if (normals.size() != 2)
      throw std::runtime_error("classify_boundary_nodes: boundary vertex with " +
                               std::to_string(normals.size()) + " boundary edges");
    const double cross = normals[0].x() * normals[1].y() - normals[0].y() * normals[1].x();
    const double angle = std::atan2(std::abs(cross), normals[0].dot(normals[1]));
    if (angle <= angle_tol) {
      classes[i].cls = NodeClass::slip;
      classes[i].normal = (normals[0] + normals[1]).normalized();
    } else {
      classes[i].cls = NodeClass::pinned;
    }
  }
  return classes;
}

/// Reduction map Z from free degrees of freedom to the full vector space.
/// Interior nodes keep both components, slip nodes keep the tangential one,
/// pinned nodes are eliminated. Columns are orthonormal by construction.
struct ConstraintOperator {
  Eigen::SparseMatrix<double> Z;  // total_dofs x free_dofs
  int free_dofs = 0;
};

inline ConstraintOperator build_constraint_operator(
    const FunctionSpace& space, const std::vector<BoundaryNodeClass>& classes) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * space.num_nodes);
  int col = 0;
  for (int i = 0; i < space.num_nodes; ++i) {
    switch (classes[i].cls) {
      case NodeClass::interior:
        trip.emplace_back(space.dof(i, 0), col, 1.0);
        ++col;
        trip.emplace_back(space.dof(i, 1), col, 1.0);
        ++col;
        break;
      case NodeClass::slip: {
        const Eigen::Vector2d n = classes[i].normal;
        if (!(n.norm() > 0.5))
          throw std::invalid_argument("build_constraint_operator: zero-length normal");
        trip.emplace_back(space.dof(i, 0), col, -n.y());
        trip.emplace_back(space.dof(i, 1), col, n.x());
        ++col;
        break;
      }
      case NodeClass::pinned:
        break;
    }
  }
  ConstraintOperator op;
  op.free_dofs = col;
  op.Z.resize(space.total_dofs, col);
  op.Z.setFromTriplets(trip.begin(), trip.end());
  return op;
}

/// Componentwise Lagrange interpolation of a vector field.
inline Eigen::VectorXd interpolate(
    const FunctionSpace& space,
    const std::function<Eigen::Vector2d(const Point2&)>& field) {
  Eigen::VectorXd coeffs(space.total_dofs);
  for (int i = 0; i < space.num_nodes; ++i) {
    const Eigen::Vector2d u = field(space.nodes[i]);
    if (!u.allFinite())
      throw std::invalid_argument("interpolate: non-finite field value");
    coeffs[space.dof(i, 0)] = u.x();
    coeffs[space.dof(i, 1)] = u.y();
  }
  return coeffs;
}

/// Scalar Lagrange P1 space used for the mixed-form multiplier.
struct ScalarSpace {
  const Mesh* mesh = nullptr;
  int num_dofs = 0;
};

inline ScalarSpace build_scalar_space(const Mesh& mesh) {
  return ScalarSpace{&mesh, mesh.num_vertices()};
}

}  // namespace jones
