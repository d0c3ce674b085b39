#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <span>
#include <vector>

#include "vpfp/core.hpp"

namespace vpfp {

/// phi(theta) = max(0, min(1, theta)); NaN maps to 0.
inline double minmod(double theta) {
  if (std::isnan(theta)) return 0.0;
  return std::max(0.0, std::min(1.0, theta));
}

/// Ratio of consecutive differences with the limiter conventions for a
/// vanishing denominator: 0/0 -> 0, c/0 -> +-inf.
inline double smoothness_ratio(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    return num > 0.0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
  }
  return num / den;
}

/**
 * Upwind MUSCL fluxes v * f_{i+1/2} for a periodic row f_0..f_{N-1}.
 * Entry i is the flux through the face between cells i and i+1 (the last
 * face wraps to cell 0). For v > 0 the face value is reconstructed from
 * cell i, for v < 0 from cell i+1, each with a minmod-limited slope.
 */
inline void muscl_flux(std::span<const double> f, double v, std::span<double> flux) {
  const std::size_t n = f.size();
  if (n == 0) return;
  if (v == 0.0) {
    std::fill(flux.begin(), flux.end(), 0.0);
    return;
  }
  // Periodic row padded with two ghost cells on each side.
  thread_local std::vector<double> pad;
  pad.resize(n + 4);
  for (std::size_t k = 0; k < n + 4; ++k) pad[k] = f[(k + 2 * n - 2) % n];
  const double* p = pad.data() + 2;  // p[i] == f[i], valid for i in [-2, n+1]
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const double jump = p[k + 1] - p[k];
    double face;
    if (v > 0.0) {
      const double theta = smoothness_ratio(p[k] - p[k - 1], jump);
      face = p[k] + 0.5 * minmod(theta) * jump;
    } else {
      const double theta = smoothness_ratio(p[k + 2] - p[k + 1], jump);
      face = p[k + 1] - 0.5 * minmod(theta) * jump;
    }
    flux[i] = v * face;
  }
}

inline std::vector<double> muscl_flux(std::span<const double> f, double v) {
  std::vector<double> flux(f.size());
  muscl_flux(f, v, flux);
  return flux;
}

struct TransportOptions {
  double cfl_limit = 1.0;
  bool allow_cfl_violation = false;
};

/// tau * max|v_1| / dx.
inline double transport_cfl(const PhaseGrid& g, double tau) {
  return tau * g.max_speed() / g.dx();
}

/**
 * Conservative MUSCL update for -tau v_1 d_x f on every velocity slice:
 * f*_i = f_i - tau/dx (F_{i+1/2} - F_{i-1/2}). Only the first velocity
 * component transports since x is one-dimensional.
 */
inline void transport_rhs(const DistributionField& f, std::vector<double>& rhs) {
  const auto& g = f.grid();
  const std::size_t nx = f.nx();
  const std::size_t nvel = f.nvel();
  rhs.assign(f.values().size(), 0.0);
  if (nx < 2) return;
  std::vector<double> row(nx), flux(nx);
  const double inv_dx = 1.0 / g.dx();
  for (std::size_t j = 0; j < nvel; ++j) {
    const double v = g.velocity(j, 0);
    for (std::size_t i = 0; i < nx; ++i) row[i] = f(i, j);
    muscl_flux(row, v, flux);
    for (std::size_t i = 0; i < nx; ++i) {
      const double left = flux[(i + nx - 1) % nx];
      rhs[i * nvel + j] = -(flux[i] - left) * inv_dx;
    }
  }
}

inline DistributionField transport_step(const DistributionField& f, double tau,
                                        const TransportOptions& opts = {}) {
  if (!f.all_finite()) throw Error("transport_step: non-finite input");
  const double cfl = transport_cfl(f.grid(), tau);
  if (cfl > opts.cfl_limit) {
    if (!opts.allow_cfl_violation)
      throw Error("transport_step: CFL number " + std::to_string(cfl) + " exceeds limit " +
                  std::to_string(opts.cfl_limit));
    std::cerr << "warning: transport CFL number " << cfl << " exceeds " << opts.cfl_limit
              << '\n';
  }
  std::vector<double> rhs;
  transport_rhs(f, rhs);
  DistributionField out = f;
  auto& vals = out.values();
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] += tau * rhs[k];
  return out;
}

}  // namespace vpfp
