#pragma once

#include <span>

#include <Eigen/Dense>

#include "vpfp/collision/divergence.hpp"
#include "vpfp/collision/objective.hpp"

namespace vpfp {

/**
 * P = (I + D H_2^{-1} D^T H_1)^{-1} for d = 1, evaluated at (f, m).
 * P is the f-block of H^{-1} A^T (A H^{-1} A^T)^{-1} A and governs how the
 * fixed-step update depends on eps; its non-unit eigenvalues are O(eps).
 */
inline Eigen::MatrixXd p_matrix(std::span<const double> f, std::span<const double> m, double eps,
                                double tau, const PhaseGrid& grid) {
  if (grid.dim != 1) throw Error("p_matrix: only defined for d = 1");
  const auto n = static_cast<Eigen::Index>(f.size());
  if (n != grid.nv || static_cast<Eigen::Index>(m.size()) != n)
    throw Error("p_matrix: f and m must have N_v entries");
  Eigen::VectorXd u(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    u[j] = f[static_cast<std::size_t>(j)];
    u[n + j] = m[static_cast<std::size_t>(j)];
  }
  // The Hessian diagonal does not depend on M; any positive M will do.
  std::vector<double> ones(f.size(), 1.0);
  const CollisionProblem prob{ones, eps, tau, grid.dv(), 1};
  const DiagonalPreconditioner H = diag_hessian(u, prob);
  const Eigen::MatrixXd D = Eigen::MatrixXd(center_difference_matrix(grid.nv, grid.dv()));
  const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n, n) +
                            D * H.m_block.cwiseInverse().asDiagonal() * D.transpose() *
                                H.f_block.asDiagonal();
  return K.inverse();
}

/// Spectral norm of P.
inline double p_matrix_norm(std::span<const double> f, std::span<const double> m, double eps,
                            double tau, const PhaseGrid& grid) {
  const Eigen::MatrixXd P = p_matrix(f, m, eps, tau, grid);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
  return svd.singularValues()[0];
}

}  // namespace vpfp
