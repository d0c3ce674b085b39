#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vpfp/core.hpp"
#include "vpfp/poisson.hpp"
#include "vpfp/transport.hpp"

namespace vpfp {

/// Largest step the explicit oracle accepts: min{dx / max|v|, eps_min dv^2} / 5.
inline double explicit_stability_bound(const PhaseGrid& grid, double eps_min) {
  double bound = eps_min * grid.dv() * grid.dv();
  if (grid.nx > 1) bound = std::min(bound, grid.dx() / grid.max_speed());
  return bound / 5.0;
}

/**
 * Adds (1/eps_i) div_v((v + g_i e_1) f + grad_v f) to `out` using the
 * conservative center-difference flux
 *   F_{k+1/2} = w_{k+1/2} (f_k + f_{k+1}) / 2 + (f_{k+1} - f_k) / dv
 * on every velocity line, with no flux through the outer walls.
 */
inline void fokker_planck_rhs(const DistributionField& f, std::span<const double> grad,
                              std::span<const double> eps, std::vector<double>& out) {
  const auto& g = f.grid();
  const std::size_t nvel = f.nvel();
  const auto nv = static_cast<std::size_t>(g.nv);
  const double dv = g.dv();
  for (std::size_t i = 0; i < f.nx(); ++i) {
    const double scale = 1.0 / (eps[i] * dv);
    auto row = f.node(i);
    double* dst = out.data() + i * nvel;
    std::size_t stride = 1;
    for (int l = 0; l < g.dim; ++l) {
      const double shift = l == 0 ? grad[i] : 0.0;
      for (std::size_t base = 0; base < nvel; ++base) {
        if ((base / stride) % nv != 0) continue;  // start of a line along axis l
        for (std::size_t k = 0; k + 1 < nv; ++k) {
          const std::size_t a = base + k * stride;
          const std::size_t b = a + stride;
          const double w = -g.half_width_v + static_cast<double>(k + 1) * dv + shift;
          const double F = (w * 0.5 * (row[a] + row[b]) + (row[b] - row[a]) / dv) * scale;
          dst[a] += F;
          dst[b] -= F;
        }
      }
      stride *= nv;
    }
  }
}

/**
 * Fully explicit resolved solver: SSP Runge-Kutta 2 in time, MUSCL in x,
 * center differences in v, Poisson re-solved at every stage. Used only to
 * cross-check the implicit scheme in regimes it can afford to resolve.
 */
class ExplicitSolver {
 public:
  ExplicitSolver(const PhaseGrid& grid, SolverConfig config)
      : grid_(grid), config_(std::move(config)) {
    config_.validate(grid_);
    eps_min_ = *std::min_element(config_.epsilon.begin(), config_.epsilon.end());
  }

  double stability_bound() const { return explicit_stability_bound(grid_, eps_min_); }

  void rhs(const DistributionField& f, std::vector<double>& out) const {
    const std::size_t nx = f.nx();
    std::vector<double> grad(nx, 0.0);
    if (config_.mode == Mode::homogeneous) {
      out.assign(f.values().size(), 0.0);
    } else {
      transport_rhs(f, out);
      if (config_.mode == Mode::vfp) {
        grad = config_.external_field;
      } else {
        grad = solve_poisson(density(f), config_.background, grid_).gradient;
      }
    }
    fokker_planck_rhs(f, grad, config_.epsilon, out);
  }

  DistributionField step(const DistributionField& f, double tau) const {
    if (!(tau > 0.0)) throw Error("explicit solver: tau must be positive");
    const double bound = stability_bound();
    if (tau > bound * (1.0 + 1e-4))
      throw Error("explicit solver: tau = " + std::to_string(tau) +
                  " exceeds the stability bound " + std::to_string(bound));
    if (!f.all_finite()) throw Error("explicit solver: non-finite input");
    std::vector<double> k;
    rhs(f, k);
    DistributionField stage = f;
    auto& s = stage.values();
    for (std::size_t n = 0; n < s.size(); ++n) s[n] += tau * k[n];
    rhs(stage, k);
    DistributionField out = f;
    auto& o = out.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = 0.5 * (o[n] + s[n] + tau * k[n]);
    return out;
  }

  /// Advances to t_end with steps of at most tau; the last step is shortened.
  DistributionField advance(DistributionField f, double t_end, double tau) const {
    double t = 0.0;
    while (t < t_end) {
      const double h = std::min(tau, t_end - t);
      f = step(f, h);
      t = (t_end - t <= tau) ? t_end : t + tau;
    }
    return f;
  }

 private:
  PhaseGrid grid_;
  SolverConfig config_;
  double eps_min_ = 1.0;
};

inline DistributionField explicit_vpfp_step(const DistributionField& f, const SolverConfig& config,
                                            const PhaseGrid& grid) {
  return ExplicitSolver(grid, config).step(f, config.tau);
}

/**
 * One upwind finite-volume step of d_t rho - d_x(rho d_x phi) = 0 with
 * -phi'' = rho - h. The face velocity is the average of -d_x phi at the two
 * neighbouring nodes.
 */
inline std::vector<double> high_field_limit_step(std::span<const double> rho,
                                                 std::span<const double> h, const PhaseGrid& grid,
                                                 double tau, double cfl_limit = 1.0) {
  const std::size_t n = rho.size();
  const PoissonSolution ps = solve_poisson(rho, h, grid);
  const double dx = grid.dx();
  std::vector<double> flux(n);
  double amax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const double a = -0.5 * (ps.gradient[i] + ps.gradient[ip]);
    amax = std::max(amax, std::abs(a));
    flux[i] = a > 0.0 ? a * rho[i] : a * rho[ip];
  }
  if (tau * amax / dx > cfl_limit)
    throw Error("high_field_limit_step: CFL number " + std::to_string(tau * amax / dx) +
                " exceeds " + std::to_string(cfl_limit));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = rho[i] - tau / dx * (flux[i] - flux[(i + n - 1) % n]);
  return out;
}

}  // namespace vpfp
