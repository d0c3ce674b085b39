#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "vpfp/core.hpp"

namespace vpfp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/**
 * Center-difference divergence on N_v cell centers with zero-flux walls.
 * The wall condition m_{1/2} = 0 folds the ghost value m_0 = -m_1 into the
 * first row, giving
 *
 *   D = 1/(2 dv) [  1  1              ]
 *                [ -1  0  1           ]
 *                [        ...         ]
 *                [          -1  0  1  ]
 *                [             -1 -1  ]
 */
inline SparseMatrix center_difference_matrix(int nv, double dv) {
  if (nv < 2) throw Error("center_difference_matrix: N_v must be >= 2");
  const double c = 1.0 / (2.0 * dv);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(2 * nv));
  for (int r = 0; r < nv; ++r) {
    if (r == 0) {
      t.emplace_back(0, 0, c);
      t.emplace_back(0, 1, c);
    } else if (r == nv - 1) {
      t.emplace_back(r, r - 1, -c);
      t.emplace_back(r, r, -c);
    } else {
      t.emplace_back(r, r - 1, -c);
      t.emplace_back(r, r + 1, c);
    }
  }
  SparseMatrix D(nv, nv);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

inline SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

/// Constraint operator A = [I | A_1 | ... | A_d] acting on u = [f; m_1; ...; m_d].
struct DivergenceOperator {
  int dim = 1;
  int nv = 0;
  double dv = 0.0;
  Eigen::Index n = 0;               // N_v^d
  std::vector<SparseMatrix> blocks; // A_l, each n x n
  SparseMatrix matrix;              // n x (1+d) n

  Eigen::Index cols() const { return (1 + dim) * n; }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return matrix * u; }

  /// sum_l A_l m_l, the velocity divergence of the momentum part.
  Eigen::VectorXd divergence(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < dim; ++l) out += blocks[static_cast<std::size_t>(l)] * u.segment((1 + l) * n, n);
    return out;
  }
};

/// A_l = I_{N^{d-l}} (x) D (x) I_{N^{l-1}} for l = 1..d (first axis fastest).
inline DivergenceOperator make_divergence_operator(int dim, int nv, double dv) {
  if (dim < 1 || dim > kMaxVelocityDim) throw Error("divergence operator: bad dimension");
  if (!(dv > 0.0)) throw Error("divergence operator: dv must be positive");
  DivergenceOperator op;
  op.dim = dim;
  op.nv = nv;
  op.dv = dv;
  const SparseMatrix D = center_difference_matrix(nv, dv);
  Eigen::Index n = 1;
  for (int k = 0; k < dim; ++k) n *= nv;
  op.n = n;

  for (int l = 1; l <= dim; ++l) {
    Eigen::Index outer = 1, inner = 1;
    for (int k = 0; k < dim - l; ++k) outer *= nv;
    for (int k = 0; k < l - 1; ++k) inner *= nv;
    SparseMatrix left = Eigen::kroneckerProduct(sparse_identity(outer), D);
    SparseMatrix block = Eigen::kroneckerProduct(left, sparse_identity(inner));
    block.makeCompressed();
    op.blocks.push_back(std::move(block));
  }

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n * (1 + 2 * dim)));
  for (Eigen::Index j = 0; j < n; ++j) t.emplace_back(j, j, 1.0);
  for (int l = 0; l < dim; ++l) {
    const auto& B = op.blocks[static_cast<std::size_t>(l)];
    for (Eigen::Index c = 0; c < B.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(B, c); it; ++it)
        t.emplace_back(it.row(), (1 + l) * n + it.col(), it.value());
  }
  op.matrix.resize(n, (1 + dim) * n);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.matrix.makeCompressed();
  return op;
}

/// Operators are immutable, so one instance per (d, N_v, dv) is shared.
inline std::shared_ptr<const DivergenceOperator> build_divergence_operator(int dim, int nv,
                                                                           double dv) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const DivergenceOperator>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(dim, nv, dv);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto op = std::make_shared<const DivergenceOperator>(make_divergence_operator(dim, nv, dv));
  cache.emplace(key, op);
  return op;
}

/**
 * Lower triangle of K = A diag(w) A^T with a fixed sparsity pattern.
 * Every stored entry of K is a weighted sum over the columns of A that touch
 * both its row and column; those (position, column, coefficient) triples are
 * precomputed so re-assembly for new weights is a single gather.
 */
class NormalMatrixPattern {
 public:
  explicit NormalMatrixPattern(const DivergenceOperator& op) {
    const SparseMatrix& A = op.matrix;
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index c = 0; c < A.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator a(A, c); a; ++a)
        for (SparseMatrix::InnerIterator b(A, c); b; ++b)
          if (a.row() >= b.row()) t.emplace_back(a.row(), b.row(), 1.0);
    }
    lower_.resize(A.rows(), A.rows());
    lower_.setFromTriplets(t.begin(), t.end());
    lower_.makeCompressed();

    for (Eigen::Index c = 0; c < A.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator a(A, c); a; ++a)
        for (SparseMatrix::InnerIterator b(A, c); b; ++b)
          if (a.row() >= b.row())
            terms_.push_back({position(a.row(), b.row()), static_cast<int>(c), a.value() * b.value()});
    }
  }

  /// Fills the stored values with sum_c A_rc A_sc w_c.
  void assemble(const Eigen::VectorXd& weights) {
    double* values = lower_.valuePtr();
    std::fill(values, values + lower_.nonZeros(), 0.0);
    for (const auto& term : terms_) values[term.position] += term.coefficient * weights[term.column];
  }

  const SparseMatrix& lower() const { return lower_; }

 private:
  struct Term {
    int position;
    int column;
    double coefficient;
  };

  int position(Eigen::Index row, Eigen::Index col) const {
    const int* begin = lower_.innerIndexPtr() + lower_.outerIndexPtr()[col];
    const int* end = lower_.innerIndexPtr() + lower_.outerIndexPtr()[col + 1];
    const int* it = std::lower_bound(begin, end, static_cast<int>(row));
    return static_cast<int>(it - lower_.innerIndexPtr());
  }

  SparseMatrix lower_;
  std::vector<Term> terms_;
};

}  // namespace vpfp
