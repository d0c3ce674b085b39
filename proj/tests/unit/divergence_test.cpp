#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "vpfp/collision/divergence.hpp"
#include "vpfp/core.hpp"

using namespace vpfp;

TEST(Divergence, CenterDifferenceMatrix) {
  const Eigen::MatrixXd D = Eigen::MatrixXd(center_difference_matrix(4, 0.5));
  Eigen::MatrixXd expected(4, 4);
  expected << 1, 1, 0, 0,
              -1, 0, 1, 0,
              0, -1, 0, 1,
              0, 0, -1, -1;
  EXPECT_LT((D - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Divergence, ColumnsSumToZero) {
  // sum_j (D m)_j = 0: the divergence cannot create mass.
  for (int d = 1; d <= 3; ++d) {
    const auto op = make_divergence_operator(d, 5, 0.3);
    for (const auto& B : op.blocks) {
      const Eigen::RowVectorXd s = Eigen::RowVectorXd::Ones(op.n) * Eigen::MatrixXd(B);
      EXPECT_LT(s.cwiseAbs().maxCoeff(), 1e-14) << "d = " << d;
    }
  }
}

TEST(Divergence, MatchesIndexwiseCenterDifference) {
  // (A_l m)_j = (m_{j + e_l} - m_{j - e_l}) / (2 dv) with m_0 = -m_1 and
  // m_{N+1} = -m_N, built directly from the multi-index.
  const int nv = 4;
  const double dv = 0.25;
  for (int d = 1; d <= 3; ++d) {
    const auto op = make_divergence_operator(d, nv, dv);
    for (int l = 0; l < d; ++l) {
      Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(op.n, op.n);
      for (Eigen::Index j = 0; j < op.n; ++j) {
        auto multi = delinearize_index(static_cast<std::size_t>(j + 1), nv, d);
        const int jl = multi[static_cast<std::size_t>(l)];
        auto neighbour = [&](int k) {
          auto m = multi;
          m[static_cast<std::size_t>(l)] = k;
          return static_cast<Eigen::Index>(linearize_index(m, nv)) - 1;
        };
        const double c = 1.0 / (2 * dv);
        if (jl < nv) dense(j, neighbour(jl + 1)) += c;
        else dense(j, neighbour(nv)) -= c;  // ghost -m_N
        if (jl > 1) dense(j, neighbour(jl - 1)) -= c;
        else dense(j, neighbour(1)) += c;   // ghost -m_1
      }
      EXPECT_LT((Eigen::MatrixXd(op.blocks[static_cast<std::size_t>(l)]) - dense).cwiseAbs().maxCoeff(), 1e-14)
          << "d = " << d << ", axis " << l;
    }
  }
}

TEST(Divergence, ConstraintLayout) {
  const auto op = make_divergence_operator(2, 3, 1.0);
  EXPECT_EQ(op.n, 9);
  EXPECT_EQ(op.cols(), 27);
  EXPECT_EQ(op.matrix.rows(), 9);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(27);
  u.head(9).setLinSpaced(1.0, 9.0);
  EXPECT_LT((op.apply(u) - u.head(9)).norm(), 1e-15);
  EXPECT_LT(op.divergence(u).norm(), 1e-15);
}

TEST(Divergence, SharedInstances) {
  const auto a = build_divergence_operator(2, 6, 0.5);
  const auto b = build_divergence_operator(2, 6, 0.5);
  EXPECT_EQ(a.get(), b.get());
}

TEST(NormalMatrix, MatchesDenseProduct) {
  const auto op = make_divergence_operator(2, 4, 0.7);
  NormalMatrixPattern pattern(op);
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(op.cols(), 0.5, 3.0);
  pattern.assemble(w);
  const Eigen::MatrixXd A = Eigen::MatrixXd(op.matrix);
  const Eigen::MatrixXd K = A * w.asDiagonal() * A.transpose();
  const Eigen::MatrixXd L = Eigen::MatrixXd(pattern.lower());
  const Eigen::MatrixXd full = Eigen::MatrixXd(L.selfadjointView<Eigen::Lower>());
  EXPECT_LT((full - K).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Divergence, RejectsBadInput) {
  EXPECT_THROW(make_divergence_operator(0, 4, 1.0), Error);
  EXPECT_THROW(make_divergence_operator(1, 1, 1.0), Error);
  EXPECT_THROW(make_divergence_operator(1, 4, 0.0), Error);
}
