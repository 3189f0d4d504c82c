// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "jones/material.hpp"
#include "jones/mesh.hpp"

namespace jones {

enum class ModeKind { s_mode, p_mode, rigid_translation, rigid_rotation };

inline const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::s_mode: return "s";
    case ModeKind::p_mode: return "p";
    case ModeKind::rigid_translation: return "rigid_translation";
    case ModeKind::rigid_rotation: return "rigid_rotation";
  }
  return "?";
}

/// Closed-form eigenmode data. Rectangle s/p modes on [0,a]x[0,b]:
///   u_s = ( a l sin(m pi x / a) cos(l pi y / b),
///          -b m cos(m pi x / a) sin(l pi y / b)),  w^2 = mu pi^2/rho (m^2/a^2 + l^2/b^2)
///   u_p = ( b m sin(m pi x / a) cos(l pi y / b),
///           a l cos(m pi x / a) sin(l pi y / b)),  w^2 = (lambda+2mu) pi^2/rho (...)
/// s modes are divergence free, p modes rotation free. Rigid modes carry
/// w^2 = 0 and identically vanishing strain; 3D rigid presets are exposed
/// through eval3().
struct AnalyticMode {
  ModeKind kind = ModeKind::s_mode;
  int m = 0, ell = 0;
  double w_squared = 0.0;
  double a = 1.0, b = 1.0;
  MaterialParams params;
  int dim = 2;
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();  // rigid translations
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();      // rigid rotations

  double kappa() const { return params.rho * w_squared; }

  Eigen::Vector2d eval(const Point2& p) const {
    const double al = m * M_PI / a, be = ell * M_PI / b;
    switch (kind) {
      case ModeKind::s_mode:
        return {a * ell * std::sin(al * p.x()) * std::cos(be * p.y()),
                -b * m * std::cos(al * p.x()) * std::sin(be * p.y())};
      case ModeKind::p_mode:
        return {b * m * std::sin(al * p.x()) * std::cos(be * p.y()),
                a * ell * std::cos(al * p.x()) * std::sin(be * p.y())};
      case ModeKind::rigid_translation:
        return direction.head<2>();
      case ModeKind::rigid_rotation:
        return {p.y(), -p.x()};
    }
    return Eigen::Vector2d::Zero();
  }

  Eigen::Vector3d eval3(const Eigen::Vector3d& p) const {
    switch (kind) {
      case ModeKind::rigid_translation:
        return direction;
      case ModeKind::rigid_rotation:
        // Rigid rotation about `axis` through the origin.
        return axis.cross(Eigen::Vector3d(-p.x(), -p.y(), -p.z()));
      default: {
        const Eigen::Vector2d u = eval(Point2(p.x(), p.y()));
        return {u.x(), u.y(), 0.0};
      }
    }
  }

  Eigen::Matrix2d grad(const Point2& p) const {
    const double al = m * M_PI / a, be = ell * M_PI / b;
    const double sc = std::sin(al * p.x()) * std::cos(be * p.y());
    const double cs = std::cos(al * p.x()) * std::sin(be * p.y());
    const double cc = std::cos(al * p.x()) * std::cos(be * p.y());
    const double ss = std::sin(al * p.x()) * std::sin(be * p.y());
    Eigen::Matrix2d g;
    switch (kind) {
      case ModeKind::s_mode:
        g << a * ell * al * cc, -a * ell * be * ss,
             b * m * al * ss, -b * m * be * cc;
        return g;
      case ModeKind::p_mode:
        g << b * m * al * cc, -b * m * be * ss,
             -a * ell * al * ss, a * ell * be * cc;
        return g;
      case ModeKind::rigid_translation:
        return Eigen::Matrix2d::Zero();
      case ModeKind::rigid_rotation:
        g << 0.0, 1.0, -1.0, 0.0;
        return g;
    }
    return Eigen::Matrix2d::Zero();
  }

  double div(const Point2& p) const {
    if (kind != ModeKind::p_mode) return 0.0;  // s and rigid modes are div-free
    const double al = m * M_PI / a, be = ell * M_PI / b;
    return (b * m * al + a * ell * be) * std::cos(al * p.x()) * std::cos(be * p.y());
  }

  double rot(const Point2& p) const {
    const double al = m * M_PI / a, be = ell * M_PI / b;
    switch (kind) {
      case ModeKind::s_mode:
        return (b * m * al + a * ell * be) * std::sin(al * p.x()) * std::sin(be * p.y());
      case ModeKind::p_mode:
        return 0.0;
      case ModeKind::rigid_translation:
        return 0.0;
      case ModeKind::rigid_rotation:
        return -2.0;
    }
    return 0.0;
  }

  Eigen::Matrix2d strain(const Point2& p) const {
    const Eigen::Matrix2d g = grad(p);
    return 0.5 * (g + g.transpose());
  }

  Eigen::Matrix2d stress(const Point2& p) const {
    const Eigen::Matrix2d e = strain(p);
    return 2.0 * params.mu * e +
           params.lambda * e.trace() * Eigen::Matrix2d::Identity();
  }

  /// -(mu Lap u + (lambda + mu) grad div u) - rho w^2 u; identically zero
  /// for exact modes.
  Eigen::Vector2d pde_residual(const Point2& p) const {
    if (kind == ModeKind::rigid_translation || kind == ModeKind::rigid_rotation)
      return Eigen::Vector2d::Zero();  // harmonic, div-free, w^2 = 0
    const double al = m * M_PI / a, be = ell * M_PI / b;
    const Eigen::Vector2d u = eval(p);
    Eigen::Vector2d lap = -(al * al + be * be) * u;
    Eigen::Vector2d grad_div = Eigen::Vector2d::Zero();
    if (kind == ModeKind::p_mode) {
      const double D = b * m * al + a * ell * be;
      grad_div = {-D * al * std::sin(al * p.x()) * std::cos(be * p.y()),
                  -D * be * std::cos(al * p.x()) * std::sin(be * p.y())};
    }
    return -(params.mu * lap + (params.lambda + params.mu) * grad_div) -
           params.rho * w_squared * u;
  }
};

/// Exact rectangle eigenmode of the given family on [0,a]x[0,b].
inline AnalyticMode rectangle_mode(ModeKind kind, int m, int ell, double a,
                                   double b, const MaterialParams& params) {
  params.validate();
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("rectangle_mode: sides must be positive");
  AnalyticMode mode;
  mode.kind = kind;
  mode.m = m;
  mode.ell = ell;
  mode.a = a;
  mode.b = b;
  mode.params = params;
  const double base = M_PI * M_PI * (m * m / (a * a) + ell * ell / (b * b));
  switch (kind) {
    case ModeKind::s_mode:
      if (m < 1 || ell < 1)
        throw std::invalid_argument("rectangle_mode: s modes need m, l >= 1");
      mode.w_squared = params.mu / params.rho * base;
      break;
    case ModeKind::p_mode:
      if (m < 0 || ell < 0 || m + ell == 0)
        throw std::invalid_argument("rectangle_mode: p modes need m, l >= 0, m + l > 0");
      mode.w_squared = (params.lambda + 2.0 * params.mu) / params.rho * base;
      break;
    default:
      throw std::invalid_argument("rectangle_mode: kind must be s or p");
  }
  return mode;
}

struct SpectrumLine {
  double w_squared = 0.0;
  double kappa = 0.0;
  ModeKind kind = ModeKind::s_mode;
  int m = 0, ell = 0;
};

/// The `count` smallest exact eigenvalues of the rectangle, both families
/// merged. Ties are ordered p before s, then lexicographic (m, l).
inline std::vector<SpectrumLine> rectangle_spectrum(double a, double b,
                                                    const MaterialParams& params,
                                                    int count) {
  if (count < 1) throw std::invalid_argument("rectangle_spectrum: count must be >= 1");
  params.validate();
  const int mmax = count + 2;
  std::vector<SpectrumLine> all;
  for (int m = 1; m <= mmax; ++m)
    for (int ell = 1; ell <= mmax; ++ell) {
      const auto mode = rectangle_mode(ModeKind::s_mode, m, ell, a, b, params);
      all.push_back({mode.w_squared, mode.kappa(), ModeKind::s_mode, m, ell});
    }
  for (int m = 0; m <= mmax; ++m)
    for (int ell = 0; ell <= mmax; ++ell) {
      if (m + ell == 0) continue;
      const auto mode = rectangle_mode(ModeKind::p_mode, m, ell, a, b, params);
      all.push_back({mode.w_squared, mode.kappa(), ModeKind::p_mode, m, ell});
    }
  std::sort(all.begin(), all.end(), [](const SpectrumLine& x, const SpectrumLine& y) {
    if (x.w_squared != y.w_squared) return x.w_squared < y.w_squared;
    if (x.kind != y.kind) return x.kind == ModeKind::p_mode;
    return std::make_pair(x.m, x.ell) < std::make_pair(y.m, y.ell);
  });
  all.resize(std::min<std::size_t>(all.size(), count));
  return all;
}

/// Domains with a known rigid-motion intersection with the constrained space.
struct RigidDomain {
  enum class Kind {
    generic_polygon,   // no rigid motion survives the normal-trace constraint
    disk,              // rotation about the center
    half_plane_x_gt,   // {x1 > a}: vertical translation
    half_plane_y_gt,   // {x2 > b}: horizontal translation
    slab3d_x,          // {b x2 + c x3 < a}: translation e1
    slab3d_y,          // {a x1 + c x3 < b}: translation e2
    slab3d_z,          // {a x1 + b x2 < c}: translation e3
    axisym3d           // solid of revolution about the z axis
  };
  Kind kind = Kind::generic_polygon;
  double offset = 0.0;
  double radius = 1.0;
};

/// Basis of rigid motions that satisfy the zero normal-trace constraint on
/// the given domain. The 3D presets are analytic data only.
inline std::vector<AnalyticMode> rigid_motion_basis(const RigidDomain& domain,
                                                    int dim) {
  using Kind = RigidDomain::Kind;
  auto translation = [&](const Eigen::Vector3d& dir) {
    AnalyticMode m;
    m.kind = ModeKind::rigid_translation;
    m.direction = dir;
    m.dim = dim;
    return m;
  };
  auto rotation = [&]() {
    AnalyticMode m;
    m.kind = ModeKind::rigid_rotation;
    m.dim = dim;
    return m;
  };
  switch (domain.kind) {
    case Kind::generic_polygon:
      if (dim != 2) throw std::invalid_argument("rigid_motion_basis: polygon is 2D");
      return {};
    case Kind::disk:
      if (dim != 2) throw std::invalid_argument("rigid_motion_basis: disk is 2D");
      return {rotation()};
    case Kind::half_plane_x_gt:
      if (dim != 2) throw std::invalid_argument("rigid_motion_basis: half-plane is 2D");
      return {translation({0.0, 1.0, 0.0})};
    case Kind::half_plane_y_gt:
      if (dim != 2) throw std::invalid_argument("rigid_motion_basis: half-plane is 2D");
      return {translation({1.0, 0.0, 0.0})};
    case Kind::slab3d_x:
      if (dim != 3) throw std::invalid_argument("rigid_motion_basis: slab is 3D");
      return {translation({1.0, 0.0, 0.0})};
    case Kind::slab3d_y:
      if (dim != 3) throw std::invalid_argument("rigid_motion_basis: slab is 3D");
      return {translation({0.0, 1.0, 0.0})};
    case Kind::slab3d_z:
      if (dim != 3) throw std::invalid_argument("rigid_motion_basis: slab is 3D");
      return {translation({0.0, 0.0, 1.0})};
    case Kind::axisym3d:
      if (dim != 3) throw std::invalid_argument("rigid_motion_basis: axisym preset is 3D");
      return {rotation()};
  }
  throw std::invalid_argument("rigid_motion_basis: unknown descriptor");
}

}  // namespace jones
