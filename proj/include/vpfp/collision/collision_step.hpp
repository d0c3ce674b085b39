#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vpfp/collision/jko.hpp"
#include "vpfp/core.hpp"
#include "vpfp/parallel.hpp"

namespace vpfp {

class CollisionError : public Error {
 public:
  CollisionError(std::size_t node, const std::string& what)
      : Error("collision step failed at spatial node " + std::to_string(node) + ": " + what),
        node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

struct CollisionStats {
  std::vector<int> iterations;  // per spatial node
  int not_converged = 0;

  int max_iterations() const {
    int m = 0;
    for (int k : iterations) m = std::max(m, k);
    return m;
  }
};

/**
 * Applies the per-node JKO step over all spatial nodes. Holds one solver
 * workspace per worker; the divergence operator is shared read-only.
 */
class CollisionOperator {
 public:
  CollisionOperator(const PhaseGrid& grid, const CollisionParams& params, int workers = 1)
      : grid_(grid), params_(params), workers_(std::max(1, workers)) {
    auto op = build_divergence_operator(grid.dim, grid.nv, grid.dv());
    for (int w = 0; w < workers_; ++w)
      solvers_.push_back(std::make_unique<JkoSolver>(op, params.linear_solver));
  }

  const CollisionParams& params() const { return params_; }

  /// rho and dphi_dx are per spatial node; eps is per node as well.
  DistributionField apply(const DistributionField& f_star, std::span<const double> rho,
                          std::span<const double> dphi_dx, std::span<const double> eps, double tau,
                          CollisionStats* stats = nullptr) {
    const std::size_t nx = f_star.nx();
    if (rho.size() != nx || dphi_dx.size() != nx || eps.size() != nx)
      throw Error("collision_step: per-node arrays must have N_x entries");
    DistributionField out(f_star.grid());
    std::vector<int> iterations(nx, 0);
    std::vector<char> converged(nx, 0);

    parallel_for(nx, workers_, [&](std::size_t worker, std::size_t i) {
      try {
        const auto shift = field_shift(dphi_dx[i], grid_.dim);
        const auto M = local_maxwellian(rho[i], shift, grid_);
        JkoResult r = solvers_[worker]->solve(f_star.node(i), M, eps[i], tau, params_);
        auto dst = out.node(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = r.u[static_cast<Eigen::Index>(j)];
        iterations[i] = r.iterations;
        converged[i] = r.converged ? 1 : 0;
      } catch (const CollisionError&) {
        throw;
      } catch (const std::exception& e) {
        throw CollisionError(i, e.what());
      }
    });

    if (stats) {
      stats->iterations = std::move(iterations);
      stats->not_converged = 0;
      for (char c : converged) stats->not_converged += c ? 0 : 1;
    }
    return out;
  }

 private:
  PhaseGrid grid_;
  CollisionParams params_;
  int workers_;
  std::vector<std::unique_ptr<JkoSolver>> solvers_;
};

inline DistributionField collision_step(const DistributionField& f_star, std::span<const double> rho,
                                        std::span<const double> dphi_dx, const SolverConfig& config,
                                        CollisionStats* stats = nullptr) {
  CollisionOperator op(f_star.grid(), config.collision, config.workers);
  return op.apply(f_star, rho, dphi_dx, config.epsilon, config.tau, stats);
}

}  // namespace vpfp
