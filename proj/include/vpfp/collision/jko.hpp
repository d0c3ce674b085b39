#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "vpfp/collision/divergence.hpp"
#include "vpfp/collision/objective.hpp"
#include "vpfp/collision/prox.hpp"

namespace vpfp {

class StepSizeUnderflow : public Error {
 public:
  using Error::Error;
};

struct JkoTraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;      // gamma (fixed step) or t (line search)
  double residual = 0.0;  // |A u - b|_inf
  double min_f = 0.0;
};

struct JkoResult {
  Eigen::VectorXd u;  // packed [f; m_1; ...; m_d]
  Eigen::Index n = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<JkoTraceEntry> trace;
  std::vector<Eigen::VectorXd> iterates;  // u^(0), u^(1), ... when requested

  Eigen::VectorXd f() const { return u.head(n); }
};

struct JkoRecording {
  bool trace = false;
  bool iterates = false;
  bool ignore_stopping = false;  // run exactly max_iter iterations
};

/**
 * Lifts entries below `floor` to it and rescales uniformly so the total
 * stays equal to sum(f_star). The objective needs f > 0 strictly.
 */
inline Eigen::VectorXd lift_to_floor(std::span<const double> f_star, double floor) {
  const auto n = static_cast<Eigen::Index>(f_star.size());
  Eigen::VectorXd b(n);
  double mass = 0.0, lifted_mass = 0.0;
  bool lifted = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v = f_star[static_cast<std::size_t>(j)];
    if (!std::isfinite(v)) throw Error("jko: non-finite entry in f*");
    mass += v;
    b[j] = v < floor ? (lifted = true, floor) : v;
    lifted_mass += b[j];
  }
  if (!(mass > 0.0)) throw Error("jko: f* must have positive mass");
  if (lifted) b *= mass / lifted_mass;
  return b;
}

/**
 * One implicit collision step at a single spatial node, posed as
 *   min F(u) s.t. A u = f*
 * and solved by the diagonally preconditioned proximal quasi-Newton
 * iteration, either with a fixed step gamma or with backtracking.
 * A solver owns its factorization workspace; use one per thread.
 */
class JkoSolver {
 public:
  explicit JkoSolver(std::shared_ptr<const DivergenceOperator> op,
                     LinearSolverKind kind = LinearSolverKind::direct)
      : prox_(std::move(op), kind) {}

  const DivergenceOperator& op() const { return prox_.op(); }

  JkoResult solve(std::span<const double> f_star, std::span<const double> maxwellian, double eps,
                  double tau, const CollisionParams& params, const JkoRecording& rec = {}) {
    params.validate();
    const DivergenceOperator& A = prox_.op();
    const Eigen::Index n = A.n;
    if (static_cast<Eigen::Index>(f_star.size()) != n || static_cast<Eigen::Index>(maxwellian.size()) != n)
      throw Error("jko: f* and M must have N_v^d entries");
    if (!(eps > 0.0)) throw Error("jko: epsilon must be positive");
    if (!(tau > 0.0)) throw Error("jko: tau must be positive");

    const CollisionProblem problem{maxwellian, eps, tau, std::pow(A.dv, A.dim), A.dim};
    const Eigen::VectorXd b = lift_to_floor(f_star, params.positivity_floor);

    JkoResult out;
    out.n = n;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(A.cols());
    u.head(n) = b;
    ObjectiveValue F = objective_terms(u, problem);

    auto record = [&](int k, double step) {
      if (rec.trace)
        out.trace.push_back({k, F.value, step, (A.matrix * u - b).lpNorm<Eigen::Infinity>(),
                             u.head(n).minCoeff()});
      if (rec.iterates) out.iterates.push_back(u);
    };
    record(0, 0.0);

    Eigen::VectorXd best = u;
    double best_value = F.value;
    constexpr double kMinStep = 0x1p-60;
    constexpr double kRound = 64.0 * std::numeric_limits<double>::epsilon();

    for (int k = 1; k <= params.max_iter; ++k) {
      diag_hessian(u, problem, H_);
      prox_.set_metric(H_);
      gradient(u, problem, g_);
      const Eigen::VectorXd& hinv = prox_.inverse_metric();

      double step = 0.0;
      ObjectiveValue F_next;
      if (params.algorithm == Algorithm::fixed_step) {
        // gamma is halved only for this iteration when positivity fails
        double gamma = params.gamma;
        for (;;) {
          trial_ = u - gamma * hinv.cwiseProduct(g_);
          prox_.project(trial_, b, z_);
          if (z_.head(n).minCoeff() > 0.0) break;
          gamma *= 0.5;
          if (gamma < kMinStep * params.gamma)
            throw StepSizeUnderflow("jko: no positive step found (fixed step)");
        }
        step = gamma;
        F_next = objective_terms(z_, problem);
      } else {
        trial_ = u - hinv.cwiseProduct(g_);
        prox_.project(trial_, b, z_);
        direction_ = z_ - u;
        const double slope = g_.dot(direction_);
        const double slack = kRound * F.magnitude;
        double t = 1.0;
        for (;;) {
          z_ = u + t * direction_;
          if (z_.head(n).minCoeff() > 0.0) {
            F_next = objective_terms(z_, problem);
            if (F_next.value <= F.value + t * params.theta * slope + slack) break;
          }
          t *= 0.5;
          if (t < kMinStep)
            throw StepSizeUnderflow("jko: line search step underflow (positivity and descent irreconcilable)");
        }
        step = t;
      }

      const double denom_F = std::max(std::abs(F.value), kRound * F.magnitude);
      const double rel_F = denom_F > 0.0 ? std::abs(F_next.value - F.value) / denom_F : 0.0;
      const double rel_u = (z_ - u).lpNorm<1>() / u.lpNorm<1>();

      u.swap(z_);
      F = F_next;
      out.iterations = k;
      record(k, step);
      if (F.value < best_value) {
        best_value = F.value;
        best = u;
      }
      if (!rec.ignore_stopping && rel_F < params.tol && rel_u < params.tol) {
        out.converged = true;
        break;
      }
    }
    out.u = (out.converged || rec.ignore_stopping) ? u : best;
    return out;
  }

 private:
  ProxSolver prox_;
  DiagonalPreconditioner H_;
  Eigen::VectorXd g_, trial_, z_, direction_;
};

inline JkoResult jko_step_fixed(std::span<const double> f_star, std::span<const double> maxwellian,
                                double eps, double tau, double gamma, double tol, int max_iter,
                                const PhaseGrid& grid, const JkoRecording& rec = {}) {
  CollisionParams p;
  p.algorithm = Algorithm::fixed_step;
  p.gamma = gamma;
  p.tol = tol;
  p.max_iter = max_iter;
  JkoSolver solver(build_divergence_operator(grid.dim, grid.nv, grid.dv()));
  return solver.solve(f_star, maxwellian, eps, tau, p, rec);
}

inline JkoResult jko_step_linesearch(std::span<const double> f_star,
                                     std::span<const double> maxwellian, double eps, double tau,
                                     double theta, double tol, int max_iter, const PhaseGrid& grid,
                                     const JkoRecording& rec = {}) {
  CollisionParams p;
  p.algorithm = Algorithm::line_search;
  p.theta = theta;
  p.tol = tol;
  p.max_iter = max_iter;
  JkoSolver solver(build_divergence_operator(grid.dim, grid.nv, grid.dv()));
  return solver.solve(f_star, maxwellian, eps, tau, p, rec);
}

}  // namespace vpfp
