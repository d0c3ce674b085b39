#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "vpfp/collision/prox.hpp"

using namespace vpfp;

namespace {

struct Case {
  std::shared_ptr<const DivergenceOperator> op;
  Eigen::VectorXd h, u, b;
};

Case random_case(int dim, int nv, unsigned seed) {
  Case c;
  c.op = build_divergence_operator(dim, nv, 6.0 / nv);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> pos(0.1, 3.0), any(-1.0, 1.0);
  c.h.resize(c.op->cols());
  c.u.resize(c.op->cols());
  c.b.resize(c.op->n);
  for (Eigen::Index k = 0; k < c.h.size(); ++k) {
    c.h[k] = pos(rng) * (k < c.op->n ? 1.0 : 1e-3);
    c.u[k] = any(rng);
  }
  for (Eigen::Index k = 0; k < c.b.size(); ++k) c.b[k] = pos(rng);
  return c;
}

/// argmin (z - u)^T H (z - u) s.t. A z = b via the dense KKT system.
Eigen::VectorXd kkt_oracle(const Case& c) {
  const Eigen::MatrixXd A = Eigen::MatrixXd(c.op->matrix);
  const Eigen::Index n = A.cols(), m = A.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = c.h.asDiagonal();
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = c.h.cwiseProduct(c.u);
  rhs.tail(m) = c.b;
  return K.fullPivLu().solve(rhs).head(n);
}

}  // namespace

TEST(Prox, FeasibleToRoundoff) {
  for (int dim = 1; dim <= 3; ++dim) {
    const Case c = random_case(dim, dim == 3 ? 8 : 24, 1u + static_cast<unsigned>(dim));
    ProxSolver solver(c.op);
    solver.set_metric(c.h);
    const Eigen::VectorXd z = solver.project(c.u, c.b);
    EXPECT_LE((c.op->matrix * z - c.b).lpNorm<Eigen::Infinity>(), 1e-10) << "d = " << dim;
  }
}

TEST(Prox, MatchesDenseKkt) {
  for (int dim = 1; dim <= 2; ++dim)
    for (unsigned seed = 0; seed < 5; ++seed) {
      const Case c = random_case(dim, 4, seed);
      ProxSolver solver(c.op);
      solver.set_metric(c.h);
      const Eigen::VectorXd z = solver.project(c.u, c.b);
      const Eigen::VectorXd ref = kkt_oracle(c);
      EXPECT_LE((z - ref).lpNorm<Eigen::Infinity>(), 1e-10 * std::max(1.0, ref.lpNorm<Eigen::Infinity>()))
          << "d = " << dim << ", seed " << seed;
    }
}

TEST(Prox, ConjugateGradientAgreesWithDirect) {
  const Case c = random_case(2, 12, 9);
  ProxSolver direct(c.op), cg(c.op, LinearSolverKind::conjugate_gradient);
  direct.set_metric(c.h);
  cg.set_metric(c.h);
  const Eigen::VectorXd a = direct.project(c.u, c.b), b = cg.project(c.u, c.b);
  EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), 1e-9);
  EXPECT_LE((c.op->matrix * b - c.b).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Prox, IsAProjection) {
  const Case c = random_case(1, 16, 3);
  ProxSolver solver(c.op);
  solver.set_metric(c.h);
  const Eigen::VectorXd z = solver.project(c.u, c.b);
  const Eigen::VectorXd zz = solver.project(z, c.b);
  EXPECT_LE((z - zz).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Prox, OneShotHelper) {
  const Case c = random_case(1, 4, 2);
  DiagonalPreconditioner H;
  H.dim = 1;
  H.f_block = c.h.head(4);
  H.m_block = c.h.tail(4);
  const Eigen::VectorXd z = prox(c.u, H, c.op, c.b);
  EXPECT_LE((z - kkt_oracle(c)).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Prox, RejectsIndefiniteMetric) {
  Case c = random_case(1, 8, 4);
  ProxSolver solver(c.op);
  c.h[3] = -1.0;
  EXPECT_THROW(solver.set_metric(c.h), FactorizationError);
  EXPECT_THROW(solver.set_metric(Eigen::VectorXd::Ones(3)), Error);
}
