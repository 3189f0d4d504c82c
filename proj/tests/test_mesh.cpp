// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <unordered_set>

#include "jones/mesh.hpp"

using namespace jones;

namespace {

int count_unique_edges(const Mesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& cell : mesh.cells)
    for (int e = 0; e < 3; ++e) {
      int a = cell[e], b = cell[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.emplace(a, b);
    }
  return static_cast<int>(edges.size());
}

bool axis_aligned(const Eigen::Vector2d& n) {
  return (std::abs(std::abs(n.x()) - 1.0) < 1e-12 && std::abs(n.y()) < 1e-12) ||
         (std::abs(std::abs(n.y()) - 1.0) < 1e-12 && std::abs(n.x()) < 1e-12);
}

double polygon_area(int n, double R) { return 0.5 * n * R * R * std::sin(2.0 * M_PI / n); }

}  // namespace

TEST(Rectangle, SingleSplitSquare) {
  const Mesh mesh = generate_rectangle(1, 1, 1, 1);
  EXPECT_EQ(mesh.num_cells(), 2);
  EXPECT_EQ(mesh.num_vertices(), 4);
  EXPECT_NEAR(mesh.h, std::sqrt(2.0), 1e-15);
}

TEST(Rectangle, TwoByOne) {
  const Mesh mesh = generate_rectangle(2, 1, 2, 1);
  EXPECT_EQ(mesh.num_cells(), 4);
  EXPECT_EQ(mesh.num_vertices(), 6);
  for (const auto& be : mesh.boundary_edges) EXPECT_TRUE(axis_aligned(be.normal));
}

TEST(Rectangle, AreaSum) {
  const Mesh mesh = generate_rectangle(1, 1, 8, 8);
  EXPECT_NEAR(mesh.total_area(), 1.0, 1e-12);
}

TEST(Rectangle, RejectsBadArguments) {
  EXPECT_THROW(generate_rectangle(-1, 1, 2, 2), std::invalid_argument);
  EXPECT_THROW(generate_rectangle(1, 0, 2, 2), std::invalid_argument);
  EXPECT_THROW(generate_rectangle(1, 1, 0, 2), std::invalid_argument);
}

TEST(LShape, CoarsestMesh) {
  const Mesh mesh = generate_lshape(1);
  EXPECT_EQ(mesh.num_cells(), 6);
  EXPECT_EQ(mesh.num_vertices(), 8);
  EXPECT_NEAR(mesh.total_area(), 3.0, 1e-12);
}

TEST(LShape, ReentrantCornerIsVertex) {
  const Mesh mesh = generate_lshape(2);
  int corner = -1;
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (mesh.vertices[i].norm() < 1e-14) corner = i;
  ASSERT_GE(corner, 0);
  // The two boundary edges at the origin run along +x and +y; their outward
  // normals (0,1) and (1,0) witness the 3 pi / 2 interior angle.
  std::vector<Eigen::Vector2d> normals;
  for (const auto& be : mesh.boundary_edges)
    if (be.a == corner || be.b == corner) normals.push_back(be.normal);
  ASSERT_EQ(normals.size(), 2u);
  const double s01 = normals[0].x() + normals[0].y();
  const double s11 = normals[1].x() + normals[1].y();
  EXPECT_NEAR(s01, 1.0, 1e-12);
  EXPECT_NEAR(s11, 1.0, 1e-12);
  EXPECT_NEAR(normals[0].dot(normals[1]), 0.0, 1e-12);
}

TEST(LShape, BoundaryNormalsAxisAligned) {
  const Mesh mesh = generate_lshape(4);
  for (const auto& be : mesh.boundary_edges) EXPECT_TRUE(axis_aligned(be.normal));
}

TEST(Disk, InscribedSquare) {
  const Mesh mesh = generate_disk(1.0, 4);
  EXPECT_EQ(mesh.num_cells(), 4);
  int on_circle = 0;
  for (const auto& v : mesh.vertices)
    if (v.norm() > 0.5) {
      EXPECT_NEAR(v.norm(), 1.0, 1e-12);
      ++on_circle;
    }
  EXPECT_EQ(on_circle, 4);
}

TEST(Disk, PolygonAreaConvergesToCircle) {
  const Mesh mesh = generate_disk(1.0, 64);
  EXPECT_EQ(static_cast<int>(mesh.boundary_edges.size()), 64);
  EXPECT_NEAR(mesh.total_area(), polygon_area(64, 1.0), 1e-10 * M_PI);
  EXPECT_LT(std::abs(mesh.total_area() - M_PI) / M_PI, 0.002);
}

TEST(Disk, ScaledBoundaryRadii) {
  const Mesh mesh = generate_disk(2.0, 32);
  for (const auto& be : mesh.boundary_edges) {
    EXPECT_NEAR(mesh.vertices[be.a].norm(), 2.0, 1e-12);
    EXPECT_NEAR(mesh.vertices[be.b].norm(), 2.0, 1e-12);
  }
}

TEST(Disk, RefinementSnapsToCircle) {
  Mesh mesh = generate_disk(1.0, 16);
  mesh = refine_uniform(mesh);
  EXPECT_EQ(static_cast<int>(mesh.boundary_edges.size()), 32);
  for (const auto& be : mesh.boundary_edges)
    EXPECT_NEAR(mesh.vertices[be.a].norm(), 1.0, 1e-12);
  EXPECT_NEAR(mesh.total_area(), polygon_area(32, 1.0), 1e-10 * M_PI);
}

TEST(TriangleDomain, Basics) {
  const Point2 p0(0, 0), p1(1, 0), p2(0, 1);
  EXPECT_EQ(generate_triangle_domain(p0, p1, p2, 1).num_cells(), 1);
  const Mesh m2 = generate_triangle_domain(p0, p1, p2, 2);
  EXPECT_EQ(m2.num_cells(), 4);
  EXPECT_NEAR(m2.total_area(), 0.5, 1e-12);
}

TEST(TriangleDomain, PaperTriangleArea) {
  const Mesh mesh = generate_triangle_domain({0, 0}, {2, 0}, {0, 1}, 8);
  EXPECT_EQ(mesh.num_cells(), 64);
  EXPECT_NEAR(mesh.total_area(), 1.0, 1e-12);
}

TEST(TriangleDomain, RejectsCollinear) {
  EXPECT_THROW(generate_triangle_domain({0, 0}, {1, 1}, {2, 2}, 2),
               std::invalid_argument);
}

TEST(TriangleDomain, AcceptsClockwiseInput) {
  const Mesh mesh = generate_triangle_domain({0, 0}, {0, 1}, {1, 0}, 3);
  EXPECT_NEAR(mesh.total_area(), 0.5, 1e-12);
}

TEST(Refine, SplitsCellsInFour) {
  const Mesh coarse = generate_rectangle(1, 1, 1, 1);
  const Mesh fine = refine_uniform(coarse);
  EXPECT_EQ(fine.num_cells(), 8);
}

TEST(Refine, EulerVertexCount) {
  for (const Mesh& mesh :
       {generate_rectangle(2, 1, 3, 2), generate_lshape(2),
        generate_triangle_domain({0, 0}, {2, 0}, {1, 2}, 3)}) {
    const Mesh fine = refine_uniform(mesh);
    EXPECT_EQ(fine.num_vertices(), mesh.num_vertices() + count_unique_edges(mesh));
  }
}

TEST(Refine, AreaConservedTwoLevels) {
  Mesh mesh = generate_lshape(1);
  mesh = refine_uniform(refine_uniform(mesh));
  EXPECT_NEAR(mesh.total_area(), 3.0, 1e-12);
}

TEST(Refine, HalvesMeshSize) {
  const Mesh coarse = generate_lshape(2);
  const Mesh fine = refine_uniform(coarse);
  EXPECT_NEAR(fine.h, 0.5 * coarse.h, 1e-12);
}

TEST(Refine, ParentVerticesPreserved) {
  for (Mesh mesh : {generate_rectangle(1, 2, 2, 3), generate_disk(1.0, 16)}) {
    const Mesh fine = refine_uniform(mesh);
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      EXPECT_EQ(fine.vertices[i].x(), mesh.vertices[i].x());
      EXPECT_EQ(fine.vertices[i].y(), mesh.vertices[i].y());
    }
  }
}

TEST(Geometry, TwoCellSquare) {
  const Mesh mesh = generate_rectangle(1, 1, 1, 1);
  const GeometryInfo info = compute_geometry(mesh);
  EXPECT_NEAR(info.h, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(info.cell_areas.size(), 2u);
  for (double a : info.cell_areas) EXPECT_NEAR(a, 0.5, 1e-15);
}

TEST(Geometry, BottomEdgeNormal) {
  const Mesh mesh = generate_rectangle(2, 1, 2, 1);
  bool found = false;
  for (const auto& be : mesh.boundary_edges) {
    const Point2 mid = 0.5 * (mesh.vertices[be.a] + mesh.vertices[be.b]);
    if (std::abs(mid.y()) < 1e-14) {
      EXPECT_NEAR(be.normal.x(), 0.0, 1e-14);
      EXPECT_NEAR(be.normal.y(), -1.0, 1e-14);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Geometry, FlagsInvertedCell) {
  Mesh mesh = generate_rectangle(1, 1, 2, 2);
  std::swap(mesh.cells[3][0], mesh.cells[3][1]);
  EXPECT_THROW(compute_geometry(mesh), std::runtime_error);
}

TEST(Geometry, NormalsUnitAndOutward) {
  for (const Mesh& mesh :
       {generate_rectangle(2, 1, 4, 2), generate_lshape(2), generate_disk(1.0, 16),
        generate_triangle_domain({0, 0}, {2, 0}, {1, 2}, 4)}) {
    for (const auto& be : mesh.boundary_edges) {
      EXPECT_NEAR(be.normal.norm(), 1.0, 1e-12);
      const Point2 mid = 0.5 * (mesh.vertices[be.a] + mesh.vertices[be.b]);
      EXPECT_GT(be.normal.dot(mid - mesh.centroid(be.cell)), 0.0);
    }
  }
}

TEST(Geometry, AreaConservationAcrossLevels) {
  struct Case {
    Mesh mesh;
    double area;
    bool disk;
  };
  std::vector<Case> cases;
  cases.push_back({generate_rectangle(2, 1, 2, 1), 2.0, false});
  cases.push_back({generate_lshape(1), 3.0, false});
  cases.push_back({generate_triangle_domain({0, 0}, {2, 0}, {1, 2}, 2), 2.0, false});
  cases.push_back({generate_disk(1.0, 8), polygon_area(8, 1.0), true});
  for (auto& c : cases) {
    Mesh mesh = c.mesh;
    for (int level = 0; level < 3; ++level) {
      const double expected =
          c.disk ? polygon_area(static_cast<int>(mesh.boundary_edges.size()), 1.0)
                 : c.area;
      EXPECT_NEAR(mesh.total_area(), expected, 1e-10 * expected);
      mesh = refine_uniform(mesh);
    }
  }
}

TEST(Geometry, ShapeRegularityUnderRefinement) {
  // Structured polygonal meshes: children are similar to parents.
  Mesh mesh = generate_lshape(1);
  const double min0 = compute_geometry(mesh).min_angle;
  for (int level = 0; level < 2; ++level) {
    mesh = refine_uniform(mesh);
    EXPECT_NEAR(compute_geometry(mesh).min_angle, min0, 1e-12);
  }
  // Disk meshes stay uniformly shape regular despite boundary snapping.
  Mesh disk = generate_disk(1.0, 8);
  const double dmin0 = compute_geometry(disk).min_angle;
  for (int level = 0; level < 3; ++level) {
    disk = refine_uniform(disk);
    EXPECT_GT(compute_geometry(disk).min_angle, 0.5 * dmin0);
  }
}

TEST(DomainSpec, BuildMeshDispatch) {
  DomainSpec spec;
  spec.tag = DomainSpec::Tag::square2;
  spec.n = 2;
  const Mesh sq2 = build_mesh(spec);
  EXPECT_NEAR(sq2.total_area(), 4.0, 1e-12);
  EXPECT_NEAR(sq2.vertices[0].x(), -1.0, 1e-15);

  spec.tag = DomainSpec::Tag::rectangle;
  spec.a = 2.0;
  spec.b = 1.0;
  spec.n = 4;
  const Mesh rect = build_mesh(spec);
  EXPECT_EQ(rect.num_cells(), 2 * 8 * 4);
  EXPECT_TRUE(spec.rectangle_family());
  EXPECT_EQ(spec.rect_sides().first, 2.0);

  spec.tag = DomainSpec::Tag::disk;
  EXPECT_TRUE(spec.axisymmetric());
}
