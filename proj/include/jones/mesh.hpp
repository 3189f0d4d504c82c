// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace jones {

using Point2 = Eigen::Vector2d;

/// One boundary segment, oriented so the owning cell lies to its left.
struct BoundaryEdge {
  int a = -1, b = -1;       // vertex ids in counter-clockwise order
  int cell = -1;            // the unique cell containing this edge
  Eigen::Vector2d normal;   // outward unit normal
};

/// How new boundary vertices are placed under uniform refinement.
enum class BoundaryKind { polygon, circle };

/// Conforming triangulation with counter-clockwise cells.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;  // max edge length over all cells

  // Circle-boundary meshes snap refined boundary vertices back to the
  // circle of radius `circle_radius` about the origin.
  BoundaryKind boundary_kind = BoundaryKind::polygon;
  double circle_radius = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }

  double signed_area(int c) const {
    const Point2& p0 = vertices[cells[c][0]];
    const Point2& p1 = vertices[cells[c][1]];
    const Point2& p2 = vertices[cells[c][2]];
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                  (p2.x() - p0.x()) * (p1.y() - p0.y()));
  }
  double cell_area(int c) const { return signed_area(c); }

  Point2 centroid(int c) const {
    return (vertices[cells[c][0]] + vertices[cells[c][1]] +
            vertices[cells[c][2]]) / 3.0;
  }

  double total_area() const {
    double s = 0.0;
    for (int c = 0; c < num_cells(); ++c) s += signed_area(c);
    return s;
  }
};

struct GeometryInfo {
  double h = 0.0;
  double min_angle = 0.0;  // radians, over all cells
  std::vector<Eigen::Vector2d> boundary_normals;
  std::vector<double> cell_areas;
};

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct EdgeRecord {
  int count = 0;
  int cell = -1;  // first cell that registered this edge
  int a = -1, b = -1;  // as oriented in that cell
};

inline std::unordered_map<std::uint64_t, EdgeRecord> collect_edges(const Mesh& mesh) {
  std::unordered_map<std::uint64_t, EdgeRecord> edges;
  edges.reserve(3 * mesh.cells.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    for (int e = 0; e < 3; ++e) {
      const int va = cell[e];
      const int vb = cell[(e + 1) % 3];
      auto& rec = edges[edge_key(va, vb)];
      if (rec.count == 0) {
        rec.cell = c;
        rec.a = va;
        rec.b = vb;
      }
      ++rec.count;
    }
  }
  return edges;
}

}  // namespace detail

/// Recomputes h, cell areas, per-edge outward normals and the minimum angle.
/// Throws if any cell is inverted (non-positive signed area) or the
/// triangulation is non-conforming.
inline GeometryInfo compute_geometry(const Mesh& mesh) {
  GeometryInfo info;
  info.cell_areas.reserve(mesh.num_cells());
  info.min_angle = M_PI;
  std::string inverted;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double area = mesh.signed_area(c);
    if (!(area > 0.0)) inverted += " " + std::to_string(c);
    info.cell_areas.push_back(area);
    const Point2& p0 = mesh.vertices[mesh.cells[c][0]];
    const Point2& p1 = mesh.vertices[mesh.cells[c][1]];
    const Point2& p2 = mesh.vertices[mesh.cells[c][2]];
    const std::array<Point2, 3> p = {p0, p1, p2};
    for (int v = 0; v < 3; ++v) {
      const Point2 e1 = p[(v + 1) % 3] - p[v];
      const Point2 e2 = p[(v + 2) % 3] - p[v];
      info.h = std::max(info.h, e1.norm());
      const double ang = std::atan2(std::abs(e1.x() * e2.y() - e1.y() * e2.x()),
                                    e1.dot(e2));
      info.min_angle = std::min(info.min_angle, ang);
    }
  }
  if (!inverted.empty())
    throw std::runtime_error("compute_geometry: inverted cells:" + inverted);

  auto edges = detail::collect_edges(mesh);
  for (const auto& [key, rec] : edges) {
    if (rec.count > 2)
      throw std::runtime_error("compute_geometry: non-conforming edge shared by " +
                               std::to_string(rec.count) + " cells");
    if (rec.count != 1) continue;
    const Point2& pa = mesh.vertices[rec.a];
    const Point2& pb = mesh.vertices[rec.b];
    Eigen::Vector2d e = pb - pa;
    Eigen::Vector2d n(e.y(), -e.x());
    n.normalize();
    const Point2 mid = 0.5 * (pa + pb);
    if (n.dot(mid - mesh.centroid(rec.cell)) <= 0.0)
      throw std::runtime_error("compute_geometry: inward boundary normal");
    info.boundary_normals.push_back(n);
  }
  return info;
}

namespace detail {

/// Fills boundary_edges, h and validates the mesh; called by every generator.
inline void finalize_mesh(Mesh& mesh) {
  for (const auto& p : mesh.vertices)
    if (!p.allFinite())
      throw std::runtime_error("mesh: non-finite vertex coordinates");
  for (const auto& cell : mesh.cells)
    for (int v : cell)
      if (v < 0 || v >= mesh.num_vertices())
        throw std::runtime_error("mesh: vertex index out of range");

  mesh.boundary_edges.clear();
  auto edges = collect_edges(mesh);
  for (const auto& [key, rec] : edges) {
    if (rec.count != 1) continue;
    BoundaryEdge be;
    be.a = rec.a;
    be.b = rec.b;
    be.cell = rec.cell;
    Eigen::Vector2d e = mesh.vertices[be.b] - mesh.vertices[be.a];
    be.normal = Eigen::Vector2d(e.y(), -e.x()).normalized();
    mesh.boundary_edges.push_back(be);
  }
  // Deterministic ordering regardless of hash-map iteration order.
  std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
            [](const BoundaryEdge& x, const BoundaryEdge& y) {
              return std::make_pair(x.a, x.b) < std::make_pair(y.a, y.b);
            });

  const GeometryInfo info = compute_geometry(mesh);  // validates
  mesh.h = info.h;
}

}  // namespace detail

/// Structured grid of 2*nx*ny triangles on [x0, x0+a] x [y0, y0+b].
/// Every grid square is split along the bottom-left to top-right diagonal.
inline Mesh generate_rectangle(double a, double b, int nx, int ny,
                               double x0 = 0.0, double y0 = 0.0) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("generate_rectangle: sides must be positive");
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("generate_rectangle: cell counts must be >= 1");
  Mesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(x0 + a * i / nx, y0 + b * j / ny);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  mesh.cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      mesh.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  detail::finalize_mesh(mesh);
  return mesh;
}

/// L-shaped domain [-1,1]^2 \ (0,1]^2 with n cells per unit length.
/// The re-entrant corner at the origin is always a mesh vertex.
inline Mesh generate_lshape(int n) {
  if (n < 1) throw std::invalid_argument("generate_lshape: n must be >= 1");
  Mesh mesh;
  std::unordered_map<std::int64_t, int> lattice;
  auto vid = [&](int i, int j) {
    const std::int64_t key =
        (static_cast<std::int64_t>(i + n) << 32) | static_cast<std::uint32_t>(j + n);
    auto it = lattice.find(key);
    if (it != lattice.end()) return it->second;
    const int id = mesh.num_vertices();
    mesh.vertices.emplace_back(static_cast<double>(i) / n,
                               static_cast<double>(j) / n);
    lattice.emplace(key, id);
    return id;
  };
  for (int j = -n; j < n; ++j)
    for (int i = -n; i < n; ++i) {
      if (i >= 0 && j >= 0) continue;  // excluded quadrant
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      mesh.cells.push_back({v00, v10, v11});
      mesh.cells.push_back({v00, v11, v01});
    }
  detail::finalize_mesh(mesh);
  return mesh;
}

/// Uniform refinement: each triangle splits into four via edge midpoints.
/// Parent vertices are preserved verbatim; on circle-boundary meshes the new
/// boundary midpoints are projected radially onto the circle.
inline Mesh refine_uniform(const Mesh& mesh) {
  Mesh fine;
  fine.boundary_kind = mesh.boundary_kind;
  fine.circle_radius = mesh.circle_radius;
  fine.vertices = mesh.vertices;

  auto edges = detail::collect_edges(mesh);
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(edges.size());
  auto mid_id = [&](int va, int vb) {
    const auto key = detail::edge_key(va, vb);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Point2 m = 0.5 * (mesh.vertices[va] + mesh.vertices[vb]);
    if (mesh.boundary_kind == BoundaryKind::circle &&
        edges.at(key).count == 1) {
      m *= mesh.circle_radius / m.norm();
    }
    const int id = fine.num_vertices();
    fine.vertices.push_back(m);
    midpoint.emplace(key, id);
    return id;
  };

  fine.cells.reserve(4 * mesh.cells.size());
  for (const auto& cell : mesh.cells) {
    const int v0 = cell[0], v1 = cell[1], v2 = cell[2];
    const int m01 = mid_id(v0, v1), m12 = mid_id(v1, v2), m20 = mid_id(v2, v0);
    fine.cells.push_back({v0, m01, m20});
    fine.cells.push_back({v1, m12, m01});
    fine.cells.push_back({v2, m20, m12});
    fine.cells.push_back({m01, m12, m20});
  }
  detail::finalize_mesh(fine);
  return fine;
}

/// Triangulation of the inscribed regular n-gon of the circle of radius R.
/// A coarse fan about the origin is refined uniformly, with new boundary
/// vertices snapped radially, until the boundary has n segments. All
/// boundary vertices lie exactly on the circle.
inline Mesh generate_disk(double R, int n) {
  if (!(R > 0.0)) throw std::invalid_argument("generate_disk: R must be positive");
  if (n < 3) throw std::invalid_argument("generate_disk: need n >= 3 boundary segments");
  int m = n, refinements = 0;
  while (m % 2 == 0 && m / 2 >= 5) {
    m /= 2;
    ++refinements;
  }
  Mesh mesh;
  mesh.boundary_kind = BoundaryKind::circle;
  mesh.circle_radius = R;
  mesh.vertices.emplace_back(0.0, 0.0);
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * M_PI * i / m;
    mesh.vertices.emplace_back(R * std::cos(t), R * std::sin(t));
  }
  for (int i = 0; i < m; ++i)
    mesh.cells.push_back({0, 1 + i, 1 + (i + 1) % m});
  detail::finalize_mesh(mesh);
  for (int r = 0; r < refinements; ++r) mesh = refine_uniform(mesh);
  if (static_cast<int>(mesh.boundary_edges.size()) != n)
    throw std::runtime_error("generate_disk: boundary segment count mismatch");
  return mesh;
}

/// n-fold barycentric refinement of the triangle (p0, p1, p2) into n^2
/// similar triangles. Vertices may be given in either orientation.
inline Mesh generate_triangle_domain(const Point2& p0, const Point2& p1,
                                     const Point2& p2, int n) {
  if (n < 1) throw std::invalid_argument("generate_triangle_domain: n must be >= 1");
  Point2 q1 = p1, q2 = p2;
  const double cross = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                       (p2.x() - p0.x()) * (p1.y() - p0.y());
  const double scale = std::max({(p1 - p0).norm(), (p2 - p0).norm(), (p2 - p1).norm()});
  if (std::abs(cross) <= 1e-14 * scale * scale)
    throw std::invalid_argument("generate_triangle_domain: collinear vertices");
  if (cross < 0.0) std::swap(q1, q2);

  Mesh mesh;
  const Point2 e1 = (q1 - p0) / n;
  const Point2 e2 = (q2 - p0) / n;
  std::vector<int> row_offset(n + 2, 0);
  for (int j = 0; j <= n; ++j) row_offset[j + 1] = row_offset[j] + (n + 1 - j);
  auto vid = [&](int i, int j) { return row_offset[j] + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i + j <= n; ++i)
      mesh.vertices.push_back(p0 + static_cast<double>(i) * e1 +
                              static_cast<double>(j) * e2);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + j < n; ++i) {
      mesh.cells.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
      if (i + j < n - 1)
        mesh.cells.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  detail::finalize_mesh(mesh);
  return mesh;
}

/// Canonical computational domains.
struct DomainSpec {
  enum class Tag { rectangle, square2, lshape, disk, triangle };
  Tag tag = Tag::rectangle;
  double a = 1.0, b = 1.0;  // rectangle sides
  double radius = 1.0;      // disk
  Point2 p0{0, 0}, p1{2, 0}, p2{1, 2};  // triangle vertices
  int n = 16;  // cells per unit length; boundary segments for the disk

  bool axisymmetric() const { return tag == Tag::disk; }
  // Domains whose spectrum is available in closed form.
  bool rectangle_family() const {
    return tag == Tag::rectangle || tag == Tag::square2;
  }
  // Side lengths used by the closed-form rectangle spectrum.
  std::pair<double, double> rect_sides() const {
    return tag == Tag::square2 ? std::make_pair(2.0, 2.0) : std::make_pair(a, b);
  }
};

inline Mesh build_mesh(const DomainSpec& spec) {
  using Tag = DomainSpec::Tag;
  switch (spec.tag) {
    case Tag::rectangle: {
      const int nx = std::max(1, static_cast<int>(std::lround(spec.a * spec.n)));
      const int ny = std::max(1, static_cast<int>(std::lround(spec.b * spec.n)));
      return generate_rectangle(spec.a, spec.b, nx, ny);
    }
    case Tag::square2:
      return generate_rectangle(2.0, 2.0, 2 * spec.n, 2 * spec.n, -1.0, -1.0);
    case Tag::lshape:
      return generate_lshape(spec.n);
    case Tag::disk:
      return generate_disk(spec.radius, spec.n);
    case Tag::triangle:
      return generate_triangle_domain(spec.p0, spec.p1, spec.p2, spec.n);
  }
  throw std::invalid_argument("build_mesh: unknown domain tag");
}

}  // namespace jones
