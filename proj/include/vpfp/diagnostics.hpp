#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vpfp/collision/objective.hpp"
#include "vpfp/core.hpp"

namespace vpfp {

/// sum f ln(f/g) * cell with 0 ln 0 = 0.
inline double relative_entropy(std::span<const double> f, std::span<const double> g, double cell) {
  if (f.size() != g.size()) throw Error("relative_entropy: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] < 0.0 || g[k] < 0.0) throw Error("relative_entropy: negative entry");
    if (f[k] == 0.0) continue;
    if (g[k] == 0.0) throw Error("relative_entropy: f > 0 where g = 0");
    s += f[k] * std::log(f[k] / g[k]);
  }
  return s * cell;
}

inline double relative_entropy(const DistributionField& f, const DistributionField& g) {
  if (!f.grid().same_shape(g.grid())) throw Error("relative_entropy: grid mismatch");
  return relative_entropy(f.values(), g.values(), f.grid().dx() * f.grid().velocity_cell());
}

/// sum |f - M| dx dv^d.
inline double l1_distance_to_equilibrium(const DistributionField& f, const DistributionField& M) {
  if (!f.grid().same_shape(M.grid())) throw Error("l1_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < f.values().size(); ++k) s += std::abs(f.values()[k] - M.values()[k]);
  return s * f.grid().dx() * f.grid().velocity_cell();
}

/// Local Maxwellian of f at every node for the field d(phi)/dx.
inline DistributionField local_equilibrium(const DistributionField& f,
                                           std::span<const double> dphi_dx) {
  const auto& g = f.grid();
  const auto rho = density(f);
  DistributionField M(g);
  for (std::size_t i = 0; i < f.nx(); ++i) {
    const double field = dphi_dx.empty() ? 0.0 : dphi_dx[i];
    const auto Mi = local_maxwellian(rho[i], field_shift(field, g.dim), g);
    std::copy(Mi.begin(), Mi.end(), M.node(i).begin());
  }
  return M;
}

enum class Refinement { velocity, time, space };

inline std::string to_string(Refinement r) {
  switch (r) {
    case Refinement::velocity: return "dv";
    case Refinement::time: return "tau";
    case Refinement::space: return "dx";
  }
  return "?";
}

/**
 * Restricts a field to the grid with half the resolution along the refined
 * direction by cell averaging. Velocity cells pair up exactly per axis;
 * spatial nodes sit at cell edges of the coarse grid, so the coarse value
 * averages fine nodes 2i-1, 2i, 2i+1 with weights 1/4, 1/2, 1/4.
 */
inline DistributionField restrict_to_coarse(const DistributionField& fine, Refinement kind) {
  const PhaseGrid& g = fine.grid();
  if (kind == Refinement::time) return fine;
  PhaseGrid c = g;
  if (kind == Refinement::velocity) {
    if (g.nv % 2) throw Error("restrict: N_v must be even");
    c.nv = g.nv / 2;
  } else {
    if (g.nx % 2) throw Error("restrict: N_x must be even");
    c.nx = g.nx / 2;
  }
  DistributionField out(c);
  if (kind == Refinement::velocity) {
    const auto nvf = static_cast<std::size_t>(g.nv);
    const auto nvc = static_cast<std::size_t>(c.nv);
    const double w = 1.0 / static_cast<double>(1u << g.dim);
    for (std::size_t i = 0; i < fine.nx(); ++i)
      for (std::size_t jc = 0; jc < out.nvel(); ++jc) {
        std::size_t idx[3] = {0, 0, 0}, rest = jc;
        for (int l = 0; l < g.dim; ++l) {
          idx[l] = rest % nvc;
          rest /= nvc;
        }
        double s = 0.0;
        for (unsigned corner = 0; corner < (1u << g.dim); ++corner) {
          std::size_t jf = 0, stride = 1;
          for (int l = 0; l < g.dim; ++l) {
            jf += (2 * idx[l] + ((corner >> l) & 1u)) * stride;
            stride *= nvf;
          }
          s += fine(i, jf);
        }
        out(i, jc) = s * w;
      }
  } else {
    const std::size_t nxf = fine.nx();
    for (std::size_t ic = 0; ic < out.nx(); ++ic) {
      // coarse node ic (0-based) sits at fine node 2 ic + 1
      const std::size_t mid = 2 * ic + 1;
      const std::size_t lo = mid - 1, hi = (mid + 1) % nxf;
      for (std::size_t j = 0; j < out.nvel(); ++j)
        out(ic, j) = 0.25 * fine(lo, j) + 0.5 * fine(mid, j) + 0.25 * fine(hi, j);
    }
  }
  return out;
}

struct RichardsonResult {
  std::vector<double> parameters;  // the coarser parameter of each pair
  std::vector<double> errors;
  double slope = 0.0;  // least-squares slope of log(error) against log(parameter)
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope: need >= 2 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(x[static_cast<std::size_t>(k)] > 0.0) || !(y[static_cast<std::size_t>(k)] > 0.0))
      throw Error("loglog_slope: values must be positive");
    A(k, 0) = std::log(x[static_cast<std::size_t>(k)]);
    A(k, 1) = 1.0;
    b[k] = std::log(y[static_cast<std::size_t>(k)]);
  }
  return A.colPivHouseholderQr().solve(b)[0];
}

/**
 * e_k = || R(f_{k+1}) - f_k ||_1 on the grid of run k, where the runs are
 * ordered coarse to fine with the refined parameter halving each time and
 * R restricts to the coarser grid.
 */
inline RichardsonResult richardson_errors(Refinement kind, std::span<const DistributionField> runs,
                                          std::span<const double> parameters) {
  if (runs.size() < 2) throw Error("richardson_errors: need at least two refinements");
  if (parameters.size() != runs.size()) throw Error("richardson_errors: one parameter per run");
  RichardsonResult out;
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    const DistributionField coarse = restrict_to_coarse(runs[k + 1], kind);
    const PhaseGrid& a = runs[k].grid();
    const PhaseGrid& b = coarse.grid();
    if (!a.same_shape(b) || std::abs(a.half_width_v - b.half_width_v) > 1e-12 ||
        std::abs(a.half_width_x - b.half_width_x) > 1e-12 || std::abs(a.x_center - b.x_center) > 1e-12)
      throw Error("richardson_errors: mismatched domains between runs " + std::to_string(k) +
                  " and " + std::to_string(k + 1));
    double s = 0.0;
    for (std::size_t n = 0; n < coarse.values().size(); ++n)
      s += std::abs(coarse.values()[n] - runs[k].values()[n]);
    out.errors.push_back(s * a.dx() * a.velocity_cell());
    out.parameters.push_back(parameters[k]);
  }
  bool positive = true;
  for (double e : out.errors) positive = positive && e > 0.0;
  out.slope = positive ? loglog_slope(out.parameters, out.errors) : 0.0;
  return out;
}

/// error_k = ||u^(k) - u*||_1 / ||u*||_1.
inline std::vector<double> optimizer_error_trace(std::span<const Eigen::VectorXd> iterates,
                                                 const Eigen::VectorXd& u_star) {
  const double norm = u_star.lpNorm<1>();
  if (!(norm > 0.0)) throw Error("optimizer_error_trace: reference has zero norm");
  std::vector<double> out;
  out.reserve(iterates.size());
  for (const auto& u : iterates) {
    if (u.size() != u_star.size()) throw Error("optimizer_error_trace: size mismatch");
    out.push_back((u - u_star).lpNorm<1>() / norm);
  }
  return out;
}

/// Composite midpoint rule with n points on [a, b].
inline double midpoint_quadrature(const std::function<double(double)>& fn, double a, double b,
                                  std::size_t n = 1'000'000) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += fn(a + (static_cast<double>(k) + 0.5) * h);
  return s * h;
}

/**
 * Global equilibrium of the Vlasov-Fokker-Planck equation with fixed
 * potential phi_0: f_inf = C exp(-|v|^2/2 - phi_0(x)), with C fixing the
 * total mass over the spatial period and all of R^d in v.
 */
inline DistributionField vfp_global_equilibrium(const std::function<double(double)>& phi0,
                                                const PhaseGrid& grid, double mass) {
  const double z = midpoint_quadrature([&](double x) { return std::exp(-phi0(x)); }, grid.x_lo(),
                                       grid.x_lo() + grid.length_x());
  const double C = mass / (z * std::pow(2.0 * std::numbers::pi, 0.5 * grid.dim));
  DistributionField f(grid);
  for (std::size_t i = 0; i < f.nx(); ++i) {
    const double px = phi0(grid.x(static_cast<int>(i)));
    for (std::size_t j = 0; j < f.nvel(); ++j) {
      double r2 = 0.0;
      for (int l = 0; l < grid.dim; ++l) r2 += grid.velocity(j, l) * grid.velocity(j, l);
      f(i, j) = C * std::exp(-0.5 * r2 - px);
    }
  }
  return f;
}

}  // namespace vpfp
