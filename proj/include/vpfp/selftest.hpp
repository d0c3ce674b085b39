#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vpfp/collision/collision_step.hpp"
#include "vpfp/collision/jko.hpp"
#include "vpfp/collision/objective.hpp"
#include "vpfp/collision/p_matrix.hpp"
#include "vpfp/collision/prox.hpp"
#include "vpfp/diagnostics.hpp"
#include "vpfp/initial_conditions.hpp"
#include "vpfp/poisson.hpp"
#include "vpfp/scheme.hpp"

namespace vpfp::selftest {

/// One property check: `value` is compared against `tolerance` by `pass`.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

struct ProxCase {
  std::shared_ptr<const DivergenceOperator> op;
  Eigen::VectorXd h, u, b;
};

inline ProxCase random_prox_case(int dim, int nv, unsigned seed) {
  ProxCase c;
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

inline Eigen::VectorXd dense_kkt(const ProxCase& c) {
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

inline Check at_most(std::string name, double value, double tol) {
  return {std::move(name), value, tol, std::isfinite(value) && value <= tol};
}

}  // namespace detail

inline Check prox_feasibility() {
  double worst = 0.0;
  for (int dim = 1; dim <= 3; ++dim)
    for (unsigned seed = 0; seed < 3; ++seed) {
      const auto c = detail::random_prox_case(dim, dim == 3 ? 8 : 24, seed + 7u * static_cast<unsigned>(dim));
      ProxSolver solver(c.op);
      solver.set_metric(c.h);
      const Eigen::VectorXd z = solver.project(c.u, c.b);
      worst = std::max(worst, (c.op->matrix * z - c.b).lpNorm<Eigen::Infinity>());
    }
  return detail::at_most("prox feasibility |Az-b|_inf", worst, 1e-10);
}

inline Check prox_vs_kkt() {
  double worst = 0.0;
  for (int dim = 1; dim <= 2; ++dim)
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto c = detail::random_prox_case(dim, 4, seed);
      ProxSolver solver(c.op);
      solver.set_metric(c.h);
      const Eigen::VectorXd ref = detail::dense_kkt(c);
      worst = std::max(worst, (solver.project(c.u, c.b) - ref).lpNorm<Eigen::Infinity>() /
                                  std::max(1.0, ref.lpNorm<Eigen::Infinity>()));
    }
  return detail::at_most("prox vs dense KKT (N_v = 4)", worst, 1e-10);
}

inline Check hessian_eigenvalues_vs_dense() {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pos(0.05, 2.0), any(-2.0, 2.0);
  double worst = 0.0;
  for (int dim = 1; dim <= 3; ++dim)
    for (double eps : {1.0, 1e-2, 1e-5})
      for (int trial = 0; trial < 20; ++trial) {
        const double f = pos(rng), tau = 0.05, dv = 0.3, cell = std::pow(dv, dim);
        std::vector<double> m(static_cast<std::size_t>(dim));
        double s2 = 0.0;
        for (double& x : m) {
          x = any(rng);
          s2 += x * x;
        }
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(1 + dim, 1 + dim);
        H(0, 0) = 2 * eps * s2 / (f * f * f) + 2 * tau / f;
        for (int l = 0; l < dim; ++l) {
          H(0, 1 + l) = H(1 + l, 0) = -2 * eps * m[static_cast<std::size_t>(l)] / (f * f);
          H(1 + l, 1 + l) = 2 * eps / f;
        }
        H *= cell;
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
        const auto z = hessian_eigenvalues(f, m, eps, tau, dv, dim);
        const double scale = ev.cwiseAbs().maxCoeff();
        worst = std::max(worst, std::abs(z.zeta2 - ev[dim]) / scale);
        worst = std::max(worst, std::abs(z.zeta3 - ev[0]) / scale);
        for (int k = 1; k < dim; ++k) worst = std::max(worst, std::abs(z.zeta1 - ev[k]) / scale);
      }
  return detail::at_most("Hessian eigenvalue formulas vs dense", worst, 1e-10);
}

inline Check gradient_vs_finite_differences() {
  double worst = 0.0;
  for (int dim = 1; dim <= 3; ++dim) {
    const PhaseGrid g = PhaseGrid::homogeneous(3.0, dim == 3 ? 4 : 8, dim);
    const auto M = local_maxwellian(1.2, std::vector<double>(static_cast<std::size_t>(dim), 0.3), g);
    std::mt19937 rng(10u + static_cast<unsigned>(dim));
    std::uniform_real_distribution<double> pos(0.2, 1.5), any(-1.0, 1.0);
    const auto n = static_cast<Eigen::Index>(g.velocity_size());
    Eigen::VectorXd u((1 + dim) * n);
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = j < n ? pos(rng) : any(rng);
    for (double eps : {1.0, 1e-3}) {
      const CollisionProblem p{M, eps, 0.05, g.velocity_cell(), dim};
      const Eigen::VectorXd grad = gradient(u, p);
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        const double h = 1e-4 * std::max(1.0, std::abs(u[k]));
        auto at = [&](double dx) {
          Eigen::VectorXd w = u;
          w[k] += dx;
          return objective(w, p);
        };
        const double fd = (8 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12 * h);
        worst = std::max(worst, std::abs(fd - grad[k]) /
                                    std::max(std::abs(grad[k]), 1e-3 * grad.lpNorm<Eigen::Infinity>()));
      }
    }
  }
  return detail::at_most("gradient vs central differences (relative)", worst, 1e-6);
}

inline Check mass_per_step() {
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 16, 6.0, 32, 1);
  const InitialState s = ic::two_stream(g);
  double worst = 0.0;
  for (double eps : {1.0, 1e-2, 1e-5}) {
    SolverConfig c;
    c.mode = Mode::full;
    c.epsilon = constant_epsilon(g, eps);
    c.tau = g.dx() / 8;
    c.final_time = 10 * c.tau;
    c.background = s.background;
    double prev = s.f.mass();
    run(g, c, s.f, [&](long, const DistributionField& f, const StepReport&) {
      worst = std::max(worst, std::abs(f.mass() - prev) / prev);
      prev = f.mass();
    });
  }
  return detail::at_most("per-step mass drift (relative)", worst, 1e-9);
}

inline Check positivity_of_iterates() {
  const PhaseGrid g = PhaseGrid::homogeneous(5.0, 64, 1);
  const DistributionField f0 = ic::double_bump(g);
  const auto M = local_maxwellian(density(f0)[0], std::vector<double>{0.0}, g);
  JkoSolver solver(build_divergence_operator(1, 64, g.dv()));
  double lowest = INFINITY;
  for (Algorithm alg : {Algorithm::fixed_step, Algorithm::line_search})
    for (double eps : {1.0, 1e-2, 1e-5}) {
      CollisionParams p;
      p.algorithm = alg;
      p.gamma = eps > 5e-3 ? 0.5 : 0.4;
      const auto r = solver.solve(f0.node(0), M, eps, 0.05, p, {false, true, false});
      for (const auto& u : r.iterates) lowest = std::min(lowest, u.head(64).minCoeff());
    }
  return {"positivity of all iterates (min f)", lowest, 0.0, lowest > 0.0};
}

inline Check entropy_decrease_per_node() {
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 12, 6.0, 32, 1);
  const InitialState s = ic::two_stream(g);
  const auto rho = density(s.f);
  const auto grad = solve_poisson(rho, s.background, g).gradient;
  double worst = -INFINITY;
  for (double eps : {1.0, 1e-2, 1e-5}) {
    CollisionOperator op(g, {}, 1);
    const DistributionField out = op.apply(s.f, rho, grad, constant_epsilon(g, eps), 0.02);
    for (std::size_t i = 0; i < out.nx(); ++i) {
      const auto M = local_maxwellian(rho[i], field_shift(grad[i], 1), g);
      worst = std::max(worst, relative_entropy(out.node(i), M, g.dv()) -
                                  relative_entropy(s.f.node(i), M, g.dv()));
    }
  }
  return detail::at_most("per-node E(f^{n+1}|M*) - E(f*|M*)", worst, 1e-10);
}

/// Largest non-unit eigenvalue of P at eps = 1e-5 over that at 1e-6 (nominal 10).
inline Check p_matrix_scaling() {
  const PhaseGrid g = PhaseGrid::homogeneous(4.0, 24, 1);
  std::vector<double> f(24), m(24);
  for (int j = 0; j < 24; ++j) {
    f[static_cast<std::size_t>(j)] = 0.1 + std::exp(-0.5 * g.v_axis(j) * g.v_axis(j));
    m[static_cast<std::size_t>(j)] = 0.2 * std::sin(g.v_axis(j));
  }
  auto largest_small = [&](double eps) {
    Eigen::VectorXd ev = Eigen::EigenSolver<Eigen::MatrixXd>(p_matrix(f, m, eps, 0.05, g)).eigenvalues().cwiseAbs();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev[ev.size() - 2];
  };
  const double ratio = largest_small(1e-5) / largest_small(1e-6);
  return {"P-matrix eigenvalue ratio eps 1e-5 / 1e-6 (O(eps))", ratio, 10.0, ratio > 8.0 && ratio < 12.0};
}

inline Check small_epsilon_limit() {
  const PhaseGrid g = PhaseGrid::homogeneous(5.0, 64, 1);
  const DistributionField f0 = ic::double_bump(g);
  const auto M = local_maxwellian(density(f0)[0], std::vector<double>{0.3}, g);
  const auto r = jko_step_linesearch(f0.node(0), M, 1e-8, 0.05, 0.01, 1e-7, 1000, g);
  double d = 0.0;
  for (std::size_t j = 0; j < M.size(); ++j) d += std::abs(r.f()[static_cast<Eigen::Index>(j)] - M[j]);
  return detail::at_most("eps = 1e-8 collision output L1 distance to M*", d * g.dv(), 1e-4);
}

inline std::vector<Check> property_suite() {
  return {prox_feasibility(),      prox_vs_kkt(),         hessian_eigenvalues_vs_dense(),
          gradient_vs_finite_differences(), mass_per_step(), positivity_of_iterates(),
          entropy_decrease_per_node(), p_matrix_scaling(), small_epsilon_limit()};
}

}  // namespace vpfp::selftest
