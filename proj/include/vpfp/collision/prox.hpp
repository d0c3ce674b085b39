#pragma once

#include <memory>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "vpfp/collision/divergence.hpp"
#include "vpfp/collision/objective.hpp"

namespace vpfp {

class FactorizationError : public Error {
 public:
  using Error::Error;
};

/**
 * H-norm projection onto {A z = b} for a positive diagonal metric H:
 *
 *   z = u + H^{-1} A^T (A H^{-1} A^T)^{-1} (b - A u).
 *
 * A H^{-1} A^T = H_1^{-1} + sum_l A_l H_2^{-1} A_l^T is a weighted graph
 * Laplacian plus a positive diagonal. Its pattern never changes, so the
 * symbolic factorization happens once per solver and set_metric() only
 * refactorizes numerically.
 */
class ProxSolver {
 public:
  explicit ProxSolver(std::shared_ptr<const DivergenceOperator> op,
                      LinearSolverKind kind = LinearSolverKind::direct)
      : op_(std::move(op)), kind_(kind), pattern_(*op_) {
    if (kind_ == LinearSolverKind::direct) ldlt_.analyzePattern(pattern_.lower());
    cg_.setTolerance(1e-14);
    cg_.setMaxIterations(static_cast<Eigen::Index>(10 * op_->n + 100));
  }

  const DivergenceOperator& op() const { return *op_; }

  /// h: packed diagonal of H (size (1+d) n, all entries > 0).
  void set_metric(const Eigen::VectorXd& h) {
    if (h.size() != op_->cols()) throw Error("prox: metric has wrong size");
    if (!(h.minCoeff() > 0.0)) throw FactorizationError("prox: metric must be positive definite");
    hinv_ = h.cwiseInverse();
    pattern_.assemble(hinv_);
    if (kind_ == LinearSolverKind::direct) {
      ldlt_.factorize(pattern_.lower());
      if (ldlt_.info() != Eigen::Success || !(ldlt_.vectorD().minCoeff() > 0.0))
        throw FactorizationError("prox: factorization of A H^-1 A^T failed");
    } else {
      cg_.compute(pattern_.lower());
    }
  }

  void set_metric(const DiagonalPreconditioner& H) { set_metric(H.packed()); }

  /// z = prox(u) for the current metric.
  void project(const Eigen::VectorXd& u, const Eigen::VectorXd& b, Eigen::VectorXd& z) {
    z = u;
    residual_ = b - op_->matrix * z;
    correct(z);
    // One refinement sweep when roundoff left a visible residual.
    residual_ = b - op_->matrix * z;
    if (residual_.lpNorm<Eigen::Infinity>() > 1e-14 * std::max(1.0, b.lpNorm<Eigen::Infinity>()))
      correct(z);
  }

  Eigen::VectorXd project(const Eigen::VectorXd& u, const Eigen::VectorXd& b) {
    Eigen::VectorXd z;
    project(u, b, z);
    return z;
  }

  const Eigen::VectorXd& inverse_metric() const { return hinv_; }

 private:
  void correct(Eigen::VectorXd& z) {
    if (kind_ == LinearSolverKind::direct) {
      lambda_ = ldlt_.solve(residual_);
    } else {
      lambda_ = cg_.solve(residual_);
      if (cg_.info() != Eigen::Success && !(cg_.error() < 1e-10))
        throw FactorizationError("prox: CG did not converge");
    }
    z.noalias() += hinv_.cwiseProduct(op_->matrix.transpose() * lambda_);
  }

  std::shared_ptr<const DivergenceOperator> op_;
  LinearSolverKind kind_;
  NormalMatrixPattern pattern_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower, Eigen::DiagonalPreconditioner<double>> cg_;
  Eigen::VectorXd hinv_, residual_, lambda_;
};

/// One-shot projection; builds and factors a fresh solver.
inline Eigen::VectorXd prox(const Eigen::VectorXd& u, const DiagonalPreconditioner& H,
                            std::shared_ptr<const DivergenceOperator> A, const Eigen::VectorXd& b) {
  ProxSolver solver(std::move(A));
  solver.set_metric(H);
  return solver.project(u, b);
}

}  // namespace vpfp
