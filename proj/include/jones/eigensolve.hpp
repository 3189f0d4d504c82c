// Copyright (c) 2026 the jonesfem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jones/assembly.hpp"

namespace jones {

/// One computed eigenpair of K u = kappa M u. The coefficient vector is
/// M-normalized with a deterministic sign (largest-magnitude entry positive).
struct EigenPair {
  double kappa = 0.0;
  Eigen::VectorXd coeffs;
  double residual = 0.0;  // ||K u - kappa M u|| / ||M u||
};

/// Maximal chain of eigenvalues with pairwise relative gaps below the
/// clustering tolerance.
struct EigenCluster {
  double kappa = 0.0;  // mean of the members
  std::vector<int> members;
  int multiplicity = 0;
};

inline void canonical_sign(Eigen::VectorXd& v) {
  int idx = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      idx = i;
    }
  if (v[idx] < 0.0) v = -v;
}

namespace detail {

/// Matrix-free view of a symmetric pencil (K, M) with M positive definite,
/// prepared for shift-invert iteration at the shift sigma.
struct PencilOps {
  int dim = 0;
  double sigma = 0.0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_K;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_M;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve_shifted;  // (K - sigma M)^{-1}
};

inline void fill_deterministic(Eigen::VectorXd& r, std::uint64_t seed) {
  std::uint64_t s = seed * 6364136223846793005ull + 1442695040888963407ull;
  for (int i = 0; i < r.size(); ++i) {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    r[i] = static_cast<double>(s >> 11) / 9007199254740992.0 - 0.5;
  }
}

/// Shift-invert Lanczos with full reorthogonalization in the M-inner
/// product. Returns the k_want smallest eigenvalues of (K, M) with
/// M-orthonormal eigenvectors.
inline std::vector<std::pair<double, Eigen::VectorXd>> lanczos_smallest(
    const PencilOps& ops, int k_want, int max_basis) {
  const int n = ops.dim;
  max_basis = std::min(max_basis, n);
  std::vector<Eigen::VectorXd> V, W;  // basis and its M-image
  std::vector<double> alpha, beta;
  V.reserve(max_basis);
  W.reserve(max_basis);

  Eigen::VectorXd r(n);
  fill_deterministic(r, 1);
  {
    Eigen::VectorXd w = ops.apply_M(r);
    const double nrm = std::sqrt(r.dot(w));
    V.push_back(r / nrm);
    W.push_back(w / nrm);
  }

  const double ritz_tol = 1e-10;
  auto ritz = [&](Eigen::VectorXd& theta, Eigen::MatrixXd& S) {
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    theta = es.eigenvalues();  // ascending
    S = es.eigenvectors();
  };

  int converged = 0;
  std::uint64_t restart_seed = 2;
  while (static_cast<int>(alpha.size()) < max_basis) {
    const int j = static_cast<int>(alpha.size());
    r = ops.solve_shifted(W[j]);
    if (j > 0 && beta[j - 1] != 0.0) r -= beta[j - 1] * V[j - 1];
    const double a = r.dot(W[j]);
    alpha.push_back(a);
    r -= a * V[j];
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < V.size(); ++i) r -= r.dot(W[i]) * V[i];

    Eigen::VectorXd w = ops.apply_M(r);
    double b = std::sqrt(std::max(0.0, r.dot(w)));
    if (b < 1e-12) {
      // Invariant subspace found; continue from a fresh direction.
      if (static_cast<int>(V.size()) >= n) break;
      fill_deterministic(r, restart_seed++);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < V.size(); ++i) r -= r.dot(W[i]) * V[i];
      w = ops.apply_M(r);
      b = std::sqrt(std::max(0.0, r.dot(w)));
      if (b < 1e-14) break;
      beta.push_back(0.0);
      V.push_back(r / b);
      W.push_back(w / b);
      continue;
    }
    beta.push_back(b);
    V.push_back(r / b);
    W.push_back(w / b);

    const int m = static_cast<int>(alpha.size());
    const int target = std::min(k_want + 2, n);
    if (m >= std::min(k_want, n) && m % 4 == 0) {
      Eigen::VectorXd theta;
      Eigen::MatrixXd S;
      ritz(theta, S);
      converged = 0;
      for (int i = m - 1; i >= std::max(0, m - target); --i) {
        const double bound = std::abs(beta[m - 1] * S(m - 1, i));
        if (theta[i] > 0.0 && bound <= ritz_tol * std::max(theta[m - 1], theta[i]))
          ++converged;
      }
      if (converged >= std::min(target, m)) break;
    }
  }

  Eigen::VectorXd theta;
  Eigen::MatrixXd S;
  ritz(theta, S);
  const int m = static_cast<int>(alpha.size());
  std::vector<std::pair<double, Eigen::VectorXd>> out;
  // Largest theta first: smallest kappa = sigma + 1/theta.
  for (int i = m - 1; i >= 0 && static_cast<int>(out.size()) < k_want; --i) {
    if (!(theta[i] > 0.0)) break;  // beyond the physical branch
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < m; ++l) x += S(l, i) * V[l];
    const Eigen::VectorXd Mx = ops.apply_M(x);
    const double nrm = std::sqrt(x.dot(Mx));
    x /= nrm;
    out.emplace_back(ops.sigma + 1.0 / theta[i], std::move(x));
  }
  if (static_cast<int>(out.size()) < k_want)
    throw std::runtime_error("lanczos_smallest: failed to converge " +
                             std::to_string(k_want) + " eigenpairs (basis " +
                             std::to_string(m) + ")");
  return out;
}

inline std::vector<std::pair<double, Eigen::VectorXd>> dense_smallest(
    const Eigen::MatrixXd& K, const Eigen::MatrixXd& M, int k_want) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      K, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_smallest: factorization failed (mass not SPD?)");
  std::vector<std::pair<double, Eigen::VectorXd>> out;
  out.reserve(k_want);
  for (int i = 0; i < k_want; ++i)
    out.emplace_back(es.eigenvalues()[i], es.eigenvectors().col(i));
  return out;
}

inline std::vector<EigenPair> finalize_pairs(
    std::vector<std::pair<double, Eigen::VectorXd>> raw,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_K,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_M,
    double tol) {
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EigenPair> pairs;
  pairs.reserve(raw.size());
  for (auto& [kappa, v] : raw) {
    const Eigen::VectorXd Mv = apply_M(v);
    v /= std::sqrt(v.dot(Mv));
    canonical_sign(v);
    EigenPair p;
    p.kappa = kappa;
    p.residual = (apply_K(v) - kappa * apply_M(v)).norm() / apply_M(v).norm();
    if (!(p.residual <= tol * std::max(1.0, std::abs(kappa))))
      throw std::runtime_error("eigensolver: residual " + std::to_string(p.residual) +
                               " exceeds tolerance at kappa " + std::to_string(kappa));
    p.coeffs = std::move(v);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline double default_shift(const SpMat& K, const SpMat& M) {
  double tk = 0.0, tm = 0.0;
  for (int i = 0; i < K.rows(); ++i) tk += K.coeff(i, i);
  for (int i = 0; i < M.rows(); ++i) tm += M.coeff(i, i);
  return -0.1 * tk / tm;
}

}  // namespace detail

/// Smallest k_want eigenpairs of the reduced or penalized pencil, ascending.
/// Dense Cholesky + tridiagonal QR up to `dense_threshold` unknowns, then
/// shift-invert Lanczos with full reorthogonalization.
inline std::vector<EigenPair> solve_gevp(const SymmetricSystem& sys, int k_want,
                                         double tol = 1e-7,
                                         int dense_threshold = 4000) {
  const int n = static_cast<int>(sys.K.rows());
  if (n == 0 || k_want <= 0) return {};
  if (k_want > n)
    throw std::invalid_argument("solve_gevp: k_want exceeds system dimension");

  auto apply_K = [&sys](const Eigen::VectorXd& x) { return Eigen::VectorXd(sys.K * x); };
  auto apply_M = [&sys](const Eigen::VectorXd& x) { return Eigen::VectorXd(sys.M * x); };

  std::vector<std::pair<double, Eigen::VectorXd>> raw;
  if (n <= dense_threshold) {
    raw = detail::dense_smallest(Eigen::MatrixXd(sys.K), Eigen::MatrixXd(sys.M), k_want);
  } else {
    detail::PencilOps ops;
    ops.dim = n;
    ops.sigma = detail::default_shift(sys.K, sys.M);
    SpMat shifted = sys.K - ops.sigma * sys.M;
    auto fact = std::make_shared<Eigen::SimplicialLDLT<SpMat>>(shifted);
    if (fact->info() != Eigen::Success)
      throw std::runtime_error("solve_gevp: shifted factorization failed");
    ops.apply_K = apply_K;
    ops.apply_M = apply_M;
    ops.solve_shifted = [fact](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(fact->solve(x));
    };
    raw = detail::lanczos_smallest(ops, k_want,
                                   std::max({120, 6 * k_want + 40}));
  }
  return detail::finalize_pairs(std::move(raw), apply_K, apply_M, tol);
}

/// Finite eigenvalues of the saddle pencil, reported on the displacement
/// space (the multiplier is eliminated). For eta > 0 the pencil is
/// equivalent to (A + eta^{-1} B^T C^{-1} B, M_u); eta = 0 is handled at
/// dense sizes through the null space of the constraint.
inline std::vector<EigenPair> solve_saddle(const SaddleSystem& sys, int k_want,
                                           double tol = 1e-5,
                                           int dense_threshold = 4000) {
  if (sys.n_u == 0 || k_want <= 0) return {};
  k_want = std::min(k_want, sys.n_u);

  // Residual check against the eliminated operator S = A + (1/eta) B^T C^-1 B.
  auto cllt = std::make_shared<Eigen::SimplicialLLT<SpMat>>(sys.C);
  if (cllt->info() != Eigen::Success)
    throw std::runtime_error("solve_saddle: multiplier mass not SPD");
  auto apply_S = [&sys, cllt](const Eigen::VectorXd& u) {
    Eigen::VectorXd r = sys.A * u;
    if (sys.eta > 0.0)
      r += (1.0 / sys.eta) * (sys.B.transpose() * cllt->solve(sys.B * u)).eval();
    return r;
  };
  auto apply_M = [&sys](const Eigen::VectorXd& u) { return Eigen::VectorXd(sys.M_u * u); };

  std::vector<std::pair<double, Eigen::VectorXd>> raw;
  if (sys.n_u + sys.n_p <= dense_threshold) {
    const Eigen::MatrixXd Mu(sys.M_u);
    if (sys.eta > 0.0) {
      const Eigen::MatrixXd Bd(sys.B);
      Eigen::LLT<Eigen::MatrixXd> c(Eigen::MatrixXd(sys.C));
      Eigen::MatrixXd S = Eigen::MatrixXd(sys.A) +
                          (1.0 / sys.eta) * (Bd.transpose() * c.solve(Bd));
      S = 0.5 * (S + S.transpose()).eval();
      raw = detail::dense_smallest(S, Mu, k_want);
    } else {
      // u must satisfy B u = 0; restrict the pencil to the null space.
      const Eigen::MatrixXd Bd(sys.B);
      Eigen::BDCSVD<Eigen::MatrixXd> svd(Bd, Eigen::ComputeFullV);
      const double thresh = 1e-12 * std::max(1.0, svd.singularValues()[0]);
      int rank = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > thresh) ++rank;
      const Eigen::MatrixXd N = svd.matrixV().rightCols(sys.n_u - rank);
      const Eigen::MatrixXd An = N.transpose() * Eigen::MatrixXd(sys.A) * N;
      const Eigen::MatrixXd Mn = N.transpose() * Mu * N;
      const int kw = std::min(k_want, static_cast<int>(An.rows()));
      for (auto& [kappa, z] : detail::dense_smallest(An, Mn, kw))
        raw.emplace_back(kappa, Eigen::VectorXd(N * z));
    }
  } else {
    if (!(sys.eta > 0.0))
      throw std::runtime_error("solve_saddle: eta = 0 supported only at dense sizes");
    // Shift-invert on the u block through one quasi-definite factorization of
    //   [[A - sigma M_u, B^T], [B, -eta C]].
    detail::PencilOps ops;
    ops.dim = sys.n_u;
    ops.sigma = detail::default_shift(sys.A, sys.M_u);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sys.A.nonZeros() + sys.M_u.nonZeros() + 2 * sys.B.nonZeros() +
                 sys.C.nonZeros());
    SpMat shifted_A = sys.A - ops.sigma * sys.M_u;
    for (int k = 0; k < shifted_A.outerSize(); ++k)
      for (SpMat::InnerIterator it(shifted_A, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < sys.B.outerSize(); ++k)
      for (SpMat::InnerIterator it(sys.B, k); it; ++it) {
        trip.emplace_back(sys.n_u + it.row(), it.col(), it.value());
        trip.emplace_back(it.col(), sys.n_u + it.row(), it.value());
      }
    for (int k = 0; k < sys.C.outerSize(); ++k)
      for (SpMat::InnerIterator it(sys.C, k); it; ++it)
        trip.emplace_back(sys.n_u + it.row(), sys.n_u + it.col(),
                          -sys.eta * it.value());
    SpMat saddle(sys.n_u + sys.n_p, sys.n_u + sys.n_p);
    saddle.setFromTriplets(trip.begin(), trip.end());
    auto fact = std::make_shared<Eigen::SimplicialLDLT<SpMat>>(saddle);
    if (fact->info() != Eigen::Success)
      throw std::runtime_error("solve_saddle: saddle factorization failed");
    const int nu = sys.n_u, np = sys.n_p;
    ops.apply_K = apply_S;
    ops.apply_M = apply_M;
    ops.solve_shifted = [fact, nu, np, &sys](const Eigen::VectorXd& y) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu + np);
      rhs.head(nu) = y;
      return Eigen::VectorXd(fact->solve(rhs).head(nu));
    };
    raw = detail::lanczos_smallest(ops, k_want, std::max({120, 6 * k_want + 40}));
  }
  return detail::finalize_pairs(std::move(raw), apply_S, apply_M, tol);
}

/// Greedy chaining of sorted eigenvalues by relative gap.
inline std::vector<EigenCluster> cluster_eigenvalues(
    const std::vector<EigenPair>& pairs, double cluster_tol = 1e-3) {
  std::vector<EigenCluster> clusters;
  if (pairs.empty()) return clusters;
  double scale = 0.0;
  for (const auto& p : pairs) scale = std::max(scale, std::abs(p.kappa));
  const double floor = 1e-6 * scale + 1e-300;

  clusters.push_back({pairs[0].kappa, {0}, 1});
  for (int i = 1; i < static_cast<int>(pairs.size()); ++i) {
    const double prev = pairs[i - 1].kappa;
    const double cur = pairs[i].kappa;
    const double gap = (cur - prev) / std::max({std::abs(cur), std::abs(prev), floor});
    if (gap <= cluster_tol) {
      clusters.back().members.push_back(i);
    } else {
      clusters.push_back({0.0, {i}, 1});
    }
  }
  for (auto& c : clusters) {
    double sum = 0.0;
    for (int i : c.members) sum += pairs[i].kappa;
    c.multiplicity = static_cast<int>(c.members.size());
    c.kappa = sum / c.multiplicity;
  }
  return clusters;
}

}  // namespace jones
