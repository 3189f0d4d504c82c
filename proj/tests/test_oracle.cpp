// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jones/oracle.hpp"

using namespace jones;

namespace {

constexpr double kPi2 = 9.869604401089358;  // pi^2

MaterialParams make_params(double mu, double lambda, double rho) {
  MaterialParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.rho = rho;
  return p;
}

// Central finite differences of the closed-form field; the independent check
// of every derivative formula in the oracle.
Eigen::Matrix2d fd_grad(const AnalyticMode& mode, const Point2& p) {
  const double h = 1e-6;
  Eigen::Matrix2d g;
  const Eigen::Vector2d dx =
      (mode.eval({p.x() + h, p.y()}) - mode.eval({p.x() - h, p.y()})) / (2 * h);
  const Eigen::Vector2d dy =
      (mode.eval({p.x(), p.y() + h}) - mode.eval({p.x(), p.y() - h})) / (2 * h);
  g << dx.x(), dy.x(), dx.y(), dy.y();
  return g;
}

}  // namespace

TEST(RectangleMode, UnitSquareShearFundamental) {
  const auto mode = rectangle_mode(ModeKind::s_mode, 1, 1, 1, 1, make_params(1, 0, 1));
  EXPECT_NEAR(mode.w_squared, 2.0 * kPi2, 1e-12);
  EXPECT_NEAR(mode.kappa(), 2.0 * kPi2, 1e-12);
}

TEST(RectangleMode, CompressionMatchesShearAtLambdaZero) {
  const auto mode = rectangle_mode(ModeKind::p_mode, 1, 0, 1, 1, make_params(1, 0, 1));
  EXPECT_NEAR(mode.w_squared, 2.0 * kPi2, 1e-12);
}

TEST(RectangleMode, IndexBounds) {
  const auto p = make_params(1, 1, 1);
  EXPECT_THROW(rectangle_mode(ModeKind::s_mode, 0, 1, 1, 1, p), std::invalid_argument);
  EXPECT_THROW(rectangle_mode(ModeKind::p_mode, 0, 0, 1, 1, p), std::invalid_argument);
  EXPECT_NO_THROW(rectangle_mode(ModeKind::p_mode, 0, 1, 1, 1, p));
}

TEST(RectangleMode, ShearModesDivergenceFree) {
  const auto mode = rectangle_mode(ModeKind::s_mode, 2, 3, 2, 1, make_params(3, 1, 2));
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ux(0, 2), uy(0, 1);
  for (int i = 0; i < 100; ++i) {
    const Point2 p(ux(rng), uy(rng));
    EXPECT_LE(std::abs(mode.div(p)), 1e-12);
    const Eigen::Matrix2d g = mode.grad(p);
    EXPECT_NEAR(g.trace(), 0.0, 1e-11);
  }
}

TEST(RectangleMode, CompressionModesRotationFree) {
  const auto mode = rectangle_mode(ModeKind::p_mode, 1, 2, 2, 1, make_params(2, 1, 1));
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> ux(0, 2), uy(0, 1);
  for (int i = 0; i < 100; ++i) {
    const Point2 p(ux(rng), uy(rng));
    EXPECT_LE(std::abs(mode.rot(p)), 1e-12);
    const Eigen::Matrix2d g = mode.grad(p);
    EXPECT_NEAR(g(1, 0) - g(0, 1), 0.0, 1e-10);
  }
}

TEST(RectangleMode, ClosedFormDerivativesMatchFiniteDifferences) {
  const auto params = make_params(2, 1, 3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.05, 1.95), uy(0.05, 0.95);
  for (ModeKind kind : {ModeKind::s_mode, ModeKind::p_mode}) {
    const auto mode = rectangle_mode(kind, 2, 1, 2, 1, params);
    for (int i = 0; i < 20; ++i) {
      const Point2 p(ux(rng), uy(rng));
      const Eigen::Matrix2d g = mode.grad(p);
      const Eigen::Matrix2d fd = fd_grad(mode, p);
      EXPECT_LT((g - fd).norm(), 1e-4 * (1.0 + g.norm()));
      EXPECT_NEAR(mode.div(p), g.trace(), 1e-10);
      EXPECT_NEAR(mode.rot(p), g(1, 0) - g(0, 1), 1e-10);
    }
  }
}

TEST(RectangleMode, PdeResidualVanishes) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(0, 2), uy(0, 1);
  for (const auto& params :
       {make_params(1, 0, 1), make_params(1, 1, 1), make_params(10, 1, 12),
        make_params(2, 1, 10)}) {
    for (ModeKind kind : {ModeKind::s_mode, ModeKind::p_mode}) {
      for (const auto [m, ell] : {std::pair{1, 1}, {2, 1}, {1, 3}}) {
        const auto mode = rectangle_mode(kind, m, ell, 2, 1, params);
        double umax = 0.0;
        for (int i = 0; i < 100; ++i) {
          const Point2 p(ux(rng), uy(rng));
          umax = std::max(umax, mode.eval(p).norm());
        }
        for (int i = 0; i < 100; ++i) {
          const Point2 p(ux(rng), uy(rng));
          EXPECT_LE(mode.pde_residual(p).norm(),
                    1e-10 * params.rho * mode.w_squared * umax);
        }
      }
    }
  }
}

// Boundary conditions: the normal trace u.n and the tangential traction
// (sigma(u) n).t vanish identically on every rectangle edge; these modes
// solve the constrained weak eigenproblem, where the normal traction acts as
// the reaction of the normal-trace constraint and does not vanish.
TEST(RectangleMode, BoundaryConditions) {
  const double a = 2.0, b = 1.0;
  for (const auto& params : {make_params(1, 1, 1), make_params(10, 1, 12)}) {
    for (ModeKind kind : {ModeKind::s_mode, ModeKind::p_mode}) {
      const auto mode = rectangle_mode(kind, 2, 1, a, b, params);
      double scale = 0.0;
      for (int i = 0; i <= 20; ++i)
        scale = std::max(scale,
                         mode.stress({a * i / 20.0, b * (i % 7) / 7.0}).norm());
      const struct {
        Eigen::Vector2d n;
        bool vertical;
        double coord;
      } edges[4] = {{{-1, 0}, true, 0.0},
                    {{1, 0}, true, a},
                    {{0, -1}, false, 0.0},
                    {{0, 1}, false, b}};
      for (const auto& e : edges) {
        const Eigen::Vector2d t(-e.n.y(), e.n.x());
        for (int i = 0; i < 50; ++i) {
          const double s = (i + 0.5) / 50.0;
          const Point2 p = e.vertical ? Point2(e.coord, b * s) : Point2(a * s, e.coord);
          EXPECT_LE(std::abs(mode.eval(p).dot(e.n)), 1e-10 * (1.0 + mode.eval(p).norm()));
          const Eigen::Vector2d traction = mode.stress(p) * e.n;
          EXPECT_LE(std::abs(traction.dot(t)), 1e-10 * scale);
        }
      }
    }
  }
}

TEST(RectangleSpectrum, UnitSquareLambdaZero) {
  const auto lines = rectangle_spectrum(1, 1, make_params(1, 0, 1), 4);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_NEAR(lines[0].w_squared, 2 * kPi2, 1e-10);
  EXPECT_NEAR(lines[1].w_squared, 2 * kPi2, 1e-10);
  EXPECT_NEAR(lines[2].w_squared, 2 * kPi2, 1e-10);
  EXPECT_NEAR(lines[3].w_squared, 4 * kPi2, 1e-10);
  EXPECT_EQ(lines[0].kind, ModeKind::p_mode);
  EXPECT_EQ(lines[1].kind, ModeKind::p_mode);
  EXPECT_EQ(lines[2].kind, ModeKind::s_mode);
  EXPECT_EQ(lines[3].kind, ModeKind::p_mode);
}

TEST(RectangleSpectrum, UnitSquareUnitLame) {
  const auto lines = rectangle_spectrum(1, 1, make_params(1, 1, 1), 7);
  const double expected[] = {2, 3, 3, 5, 5, 6, 8};
  for (int i = 0; i < 7; ++i)
    EXPECT_NEAR(lines[i].w_squared / kPi2, expected[i], 1e-10);
}

TEST(RectangleSpectrum, TwoByOneRectangle) {
  const auto lines = rectangle_spectrum(2, 1, make_params(1, 1, 1), 4);
  const double expected[] = {0.75, 1.25, 2.0, 3.0};
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(lines[i].w_squared / kPi2, expected[i], 1e-10);
}

TEST(RectangleSpectrum, TwoByOneStiffShear) {
  const auto lines = rectangle_spectrum(2, 1, make_params(10, 1, 1), 5);
  const double expected[] = {5.25, 12.5, 20.0, 21.0, 21.0};
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(lines[i].w_squared / kPi2, expected[i], 1e-10);
}

TEST(RectangleSpectrum, SortedWithAdjacentTies) {
  const auto lines = rectangle_spectrum(1.5, 0.7, make_params(3, 2, 5), 20);
  for (std::size_t i = 1; i < lines.size(); ++i)
    EXPECT_GE(lines[i].w_squared, lines[i - 1].w_squared - 1e-14);
  for (const auto& line : lines) EXPECT_NEAR(line.kappa, 5.0 * line.w_squared, 1e-10);
}

TEST(RigidBasis, DiskRotationTangential) {
  const auto basis = rigid_motion_basis({RigidDomain::Kind::disk, 0.0, 1.0}, 2);
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_EQ(basis[0].kind, ModeKind::rigid_rotation);
  for (int i = 0; i < 32; ++i) {
    const double t = 2 * M_PI * i / 32.0;
    const Point2 p(std::cos(t), std::sin(t));
    EXPECT_EQ(basis[0].eval(p).dot(p), 0.0);  // exactly tangential
  }
}

TEST(RigidBasis, HalfPlanes) {
  const auto above = rigid_motion_basis({RigidDomain::Kind::half_plane_y_gt, 0.3, 0}, 2);
  ASSERT_EQ(above.size(), 1u);
  EXPECT_TRUE(above[0].eval({0, 0}).isApprox(Eigen::Vector2d(1, 0)));
  const auto right = rigid_motion_basis({RigidDomain::Kind::half_plane_x_gt, -1.0, 0}, 2);
  ASSERT_EQ(right.size(), 1u);
  EXPECT_TRUE(right[0].eval({0, 0}).isApprox(Eigen::Vector2d(0, 1)));
}

TEST(RigidBasis, SquareSupportsNoRigidMode) {
  const auto basis = rigid_motion_basis({RigidDomain::Kind::generic_polygon, 0, 0}, 2);
  EXPECT_TRUE(basis.empty());
  // Each rigid motion of the plane violates u.n = 0 somewhere on the unit
  // square boundary: sample all three basis fields on all four edges.
  AnalyticMode tx, ty, rot;
  tx.kind = ModeKind::rigid_translation;
  tx.direction = {1, 0, 0};
  ty.kind = ModeKind::rigid_translation;
  ty.direction = {0, 1, 0};
  rot.kind = ModeKind::rigid_rotation;
  for (const auto& mode : {tx, ty, rot}) {
    double worst = 0.0;
    const Eigen::Vector2d normals[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    for (int e = 0; e < 4; ++e) {
      for (int i = 0; i <= 10; ++i) {
        const double s = i / 10.0;
        const Point2 p = e == 0   ? Point2(s, 0)
                         : e == 1 ? Point2(1, s)
                         : e == 2 ? Point2(s, 1)
                                  : Point2(0, s);
        worst = std::max(worst, std::abs(mode.eval(p).dot(normals[e])));
      }
    }
    EXPECT_GT(worst, 0.4);
  }
}

TEST(RigidBasis, RigidModesHaveZeroStrain) {
  AnalyticMode rot;
  rot.kind = ModeKind::rigid_rotation;
  AnalyticMode tr;
  tr.kind = ModeKind::rigid_translation;
  tr.direction = {0.6, -0.8, 0};
  for (const auto& mode : {rot, tr}) {
    for (const Point2& p : {Point2(0.3, -1.2), Point2(2.0, 0.1)}) {
      EXPECT_NEAR(mode.strain(p).norm(), 0.0, 1e-15);
      EXPECT_LE(mode.pde_residual(p).norm(), 1e-15);
    }
  }
}

TEST(RigidBasis, ThreeDimensionalPresets) {
  const auto sx = rigid_motion_basis({RigidDomain::Kind::slab3d_x, 0, 0}, 3);
  ASSERT_EQ(sx.size(), 1u);
  EXPECT_TRUE(sx[0].eval3({0.2, 1.0, -3.0}).isApprox(Eigen::Vector3d(1, 0, 0)));
  const auto ax = rigid_motion_basis({RigidDomain::Kind::axisym3d, 0, 1.0}, 3);
  ASSERT_EQ(ax.size(), 1u);
  // Rotation about z is tangential to any cylinder about the axis.
  const Eigen::Vector3d p(0.6, 0.8, 0.37);
  const Eigen::Vector3d u = ax[0].eval3(p);
  EXPECT_NEAR(u.dot(Eigen::Vector3d(p.x(), p.y(), 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(u.norm(), std::hypot(p.x(), p.y()), 1e-15);
  EXPECT_THROW(rigid_motion_basis({RigidDomain::Kind::slab3d_x, 0, 0}, 2),
               std::invalid_argument);
}
