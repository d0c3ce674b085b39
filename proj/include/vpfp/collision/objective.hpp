#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vpfp/core.hpp"

namespace vpfp {

/// M_j = rho / (2 pi)^{d/2} exp(-|v_j + grad_phi|^2 / 2).
inline std::vector<double> local_maxwellian(double rho, std::span<const double> grad_phi,
                                            const PhaseGrid& grid) {
  if (!(rho > 0.0)) throw Error("local_maxwellian: density must be positive");
  if (grad_phi.size() != static_cast<std::size_t>(grid.dim))
    throw Error("local_maxwellian: field must have d components");
  const std::size_t n = grid.velocity_size();
  const double scale = rho / std::pow(2.0 * std::numbers::pi, 0.5 * grid.dim);
  std::vector<double> M(n);
  for (std::size_t j = 0; j < n; ++j) {
    double r2 = 0.0;
    for (int l = 0; l < grid.dim; ++l) {
      const double w = grid.velocity(j, l) + grad_phi[static_cast<std::size_t>(l)];
      r2 += w * w;
    }
    M[j] = scale * std::exp(-0.5 * r2);
  }
  return M;
}

/// Shift vector for a 1D spatial field: only the first velocity axis is forced.
inline std::vector<double> field_shift(double dphi_dx, int dim) {
  std::vector<double> g(static_cast<std::size_t>(dim), 0.0);
  g[0] = dphi_dx;
  return g;
}

/**
 * Data of one per-node JKO problem
 *   F(u) = sum_j (eps |m_j|^2 / f_j + 2 tau f_j ln(f_j / M_j)) dv^d
 * for the packed unknown u = [f; m_1; ...; m_d].
 */
struct CollisionProblem {
  std::span<const double> maxwellian;
  double eps = 1.0;
  double tau = 1.0;
  double cell = 1.0;  // dv^d
  int dim = 1;

  Eigen::Index n() const { return static_cast<Eigen::Index>(maxwellian.size()); }
};

struct ObjectiveValue {
  double value = 0.0;
  double magnitude = 0.0;  // sum of |terms|, the roundoff scale of `value`
};

namespace detail {
inline double momentum_sq(const Eigen::VectorXd& u, Eigen::Index n, int dim, Eigen::Index j) {
  double s = 0.0;
  for (int l = 0; l < dim; ++l) {
    const double m = u[(1 + l) * n + j];
    s += m * m;
  }
  return s;
}

inline void require_positive(double f, Eigen::Index j) {
  if (!(f > 0.0))
    throw PositivityViolation("collision objective: f_" + std::to_string(j) + " = " +
                              std::to_string(f) + " is not positive");
}
}  // namespace detail

inline ObjectiveValue objective_terms(const Eigen::VectorXd& u, const CollisionProblem& p) {
  const Eigen::Index n = p.n();
  ObjectiveValue out;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double f = u[j];
    detail::require_positive(f, j);
    const double kinetic = p.eps * detail::momentum_sq(u, n, p.dim, j) / f;
    const double entropy = 2.0 * p.tau * f * std::log(f / p.maxwellian[static_cast<std::size_t>(j)]);
    out.value += kinetic + entropy;
    out.magnitude += kinetic + std::abs(entropy);
  }
  out.value *= p.cell;
  out.magnitude *= p.cell;
  return out;
}

inline double objective(const Eigen::VectorXd& u, const CollisionProblem& p) {
  return objective_terms(u, p).value;
}

inline void gradient(const Eigen::VectorXd& u, const CollisionProblem& p, Eigen::VectorXd& g) {
  const Eigen::Index n = p.n();
  g.resize(u.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double f = u[j];
    detail::require_positive(f, j);
    const double s = detail::momentum_sq(u, n, p.dim, j);
    g[j] = (-p.eps * s / (f * f) +
            2.0 * p.tau * (std::log(f / p.maxwellian[static_cast<std::size_t>(j)]) + 1.0)) *
           p.cell;
    for (int l = 0; l < p.dim; ++l) g[(1 + l) * n + j] = 2.0 * p.eps * u[(1 + l) * n + j] / f * p.cell;
  }
}

inline Eigen::VectorXd gradient(const Eigen::VectorXd& u, const CollisionProblem& p) {
  Eigen::VectorXd g;
  gradient(u, p, g);
  return g;
}

/// Diagonal of the Hessian: H_1 on the f-block, H_2 (shared by every m_l) on the rest.
struct DiagonalPreconditioner {
  Eigen::VectorXd f_block;
  Eigen::VectorXd m_block;
  int dim = 1;

  Eigen::VectorXd packed() const {
    const Eigen::Index n = f_block.size();
    Eigen::VectorXd h((1 + dim) * n);
    h.head(n) = f_block;
    for (int l = 0; l < dim; ++l) h.segment((1 + l) * n, n) = m_block;
    return h;
  }
};

inline void diag_hessian(const Eigen::VectorXd& u, const CollisionProblem& p,
                         DiagonalPreconditioner& H) {
  const Eigen::Index n = p.n();
  H.dim = p.dim;
  H.f_block.resize(n);
  H.m_block.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double f = u[j];
    detail::require_positive(f, j);
    const double s = detail::momentum_sq(u, n, p.dim, j);
    H.f_block[j] = (2.0 * p.eps * s / (f * f * f) + 2.0 * p.tau / f) * p.cell;
    H.m_block[j] = 2.0 * p.eps / f * p.cell;
  }
}

inline DiagonalPreconditioner diag_hessian(const Eigen::VectorXd& u, const CollisionProblem& p) {
  DiagonalPreconditioner H;
  diag_hessian(u, p, H);
  return H;
}

/**
 * Closed-form eigenvalues of the per-node Hessian block. zeta1 has
 * multiplicity d-1 (absent for d = 1); zeta2 >= zeta3 are the remaining pair.
 */
struct HessianEigenvalues {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta3 = 0.0;
};

inline HessianEigenvalues hessian_eigenvalues(double f, std::span<const double> m, double eps,
                                              double tau, double dv, int dim) {
  if (!(f > 0.0)) throw PositivityViolation("hessian_eigenvalues: f must be positive");
  double s = 0.0;
  for (double ml : m) s += ml * ml;
  const double cell = std::pow(dv, dim);
  const double a = eps * s / (f * f * f);
  const double mid = a + (tau + eps) / f;
  const double rad = std::sqrt(a * a + 2.0 * eps * s * (tau + eps) / (f * f * f * f) +
                               ((tau - eps) / f) * ((tau - eps) / f));
  // mid - rad cancels badly when eps << tau; use zeta2 * zeta3 = 4 eps tau / f^2.
  const double upper = mid + rad;
  return {2.0 * eps / f * cell, upper * cell, 4.0 * eps * tau / (f * f) / upper * cell};
}

}  // namespace vpfp
