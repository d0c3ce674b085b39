#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vpfp/core.hpp"
#include "vpfp/poisson.hpp"

namespace vpfp {

/// Distribution plus the spatial data a run needs besides f.
struct InitialState {
  DistributionField f;
  std::vector<double> background;      // h(x_i); empty when unused
  std::vector<double> external_field;  // d(phi_0)/dx at x_i; empty when unused
  std::vector<double> epsilon;         // eps(x_i); empty means "use the configured constant"
};

namespace ic {

inline constexpr double kSqrt2Pi = 2.5066282746310002;

/// Homogeneous double bump: 2 exp(-(v-1.5)^2/1.2) + exp(-(v+1.5)^2/1.5)/2.
inline DistributionField double_bump(const PhaseGrid& grid) {
  if (grid.dim != 1) throw Error("double_bump: needs d = 1");
  DistributionField f(grid);
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nvel(); ++j) {
      const double v = grid.velocity(j, 0);
      f(i, j) = 2.0 * std::exp(-(v - 1.5) * (v - 1.5) / 1.2) +
                0.5 * std::exp(-(v + 1.5) * (v + 1.5) / 1.5);
    }
  return f;
}

inline double two_stream_density(double x) {
  return kSqrt2Pi * (2.0 + std::cos(2.0 * std::numbers::pi * x));
}

inline double two_stream_background(double x) {
  return 5.0132 / 1.2661 * std::exp(std::cos(2.0 * std::numbers::pi * x));
}

/**
 * rho0 = sqrt(2 pi)(2 + cos 2 pi x),
 * f0 = rho0 / (2 sqrt(2 pi)) (exp(-(v+1.5)^2/2) + exp(-(v-1.5)^2/2)),
 * h = 5.0132/1.2661 exp(cos 2 pi x). Extra velocity axes carry a standard
 * Gaussian.
 */
inline InitialState two_stream(const PhaseGrid& grid) {
  InitialState s{DistributionField(grid), {}, {}, {}};
  const double extra = std::pow(kSqrt2Pi, grid.dim - 1);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double rho = two_stream_density(x);
    s.background.push_back(two_stream_background(x));
    for (std::size_t j = 0; j < s.f.nvel(); ++j) {
      const double v = grid.velocity(j, 0);
      double tail = 1.0;
      for (int l = 1; l < grid.dim; ++l) {
        const double w = grid.velocity(j, l);
        tail *= std::exp(-0.5 * w * w);
      }
      s.f(static_cast<std::size_t>(i), j) =
          rho / (2.0 * kSqrt2Pi) *
          (std::exp(-0.5 * (v + 1.5) * (v + 1.5)) + std::exp(-0.5 * (v - 1.5) * (v - 1.5))) *
          tail / extra;
    }
  }
  return s;
}

/// Two-stream data with the fixed potential phi_0 = sin(2 pi x)/5 replacing Poisson.
inline InitialState vfp(const PhaseGrid& grid) {
  InitialState s = two_stream(grid);
  s.background.clear();
  for (int i = 0; i < grid.nx; ++i)
    s.external_field.push_back(0.4 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * grid.x(i)));
  return s;
}

inline double vfp_potential(double x) { return 0.2 * std::sin(2.0 * std::numbers::pi * x); }

/// eps(x) = eps0 + (tanh(5 - 10x) + tanh(5 + 10x))/2 for x <= 0.3, eps0 beyond.
inline double mixing_epsilon(double x, double eps0 = 1e-3) {
  if (x > 0.3) return eps0;
  return eps0 + 0.5 * (std::tanh(5.0 - 10.0 * x) + std::tanh(5.0 + 10.0 * x));
}

/**
 * rho0 = sqrt(2 pi)/6 (2 + sin pi x), h = 1.6711/2.5321 exp(cos pi x),
 * f0 = rho0 / sqrt(2 pi) exp(-(v + phi0_x)^2 / 2), where phi0 solves the
 * Poisson equation with rho0 first.
 */
inline InitialState mixing(const PhaseGrid& grid, double eps0 = 1e-3) {
  if (grid.dim != 1) throw Error("mixing: needs d = 1");
  InitialState s{DistributionField(grid), {}, {}, {}};
  std::vector<double> rho(static_cast<std::size_t>(grid.nx));
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    rho[static_cast<std::size_t>(i)] = kSqrt2Pi / 6.0 * (2.0 + std::sin(std::numbers::pi * x));
    s.background.push_back(1.6711 / 2.5321 * std::exp(std::cos(std::numbers::pi * x)));
    s.epsilon.push_back(mixing_epsilon(x, eps0));
  }
  const auto grad = solve_poisson(rho, s.background, grid).gradient;
  for (std::size_t i = 0; i < s.f.nx(); ++i)
    for (std::size_t j = 0; j < s.f.nvel(); ++j) {
      const double w = grid.velocity(j, 0) + grad[i];
      s.f(i, j) = rho[i] / kSqrt2Pi * std::exp(-0.5 * w * w);
    }
  return s;
}

namespace detail {
inline double bump2(double v1, double v2, double c1, double c2) {
  return std::exp(-(v2 - c2) * (v2 - c2) - (v1 - c1) * (v1 - c1));
}
}  // namespace detail

/// Homogeneous four-bump profile in d = 2.
inline DistributionField four_bump_2d(const PhaseGrid& grid) {
  if (grid.dim != 2) throw Error("four_bump_2d: needs d = 2");
  DistributionField f(grid);
  const double ip = 1.0 / std::numbers::pi;
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nvel(); ++j) {
      const double v1 = grid.velocity(j, 0), v2 = grid.velocity(j, 1);
      f(i, j) = detail::bump2(v1, v2, 1, 1) + ip * detail::bump2(v1, v2, -1, -1) +
                2 * ip * detail::bump2(v1, v2, -1, 1) + 4 * ip * detail::bump2(v1, v2, 1, -1);
    }
  return f;
}

/// Two semi-torus rings of radius 2 centred at (2, 2) and (-2, -2).
inline DistributionField semi_torus_2d(const PhaseGrid& grid) {
  if (grid.dim != 2) throw Error("semi_torus_2d: needs d = 2");
  DistributionField f(grid);
  auto ring = [](double a, double b) {
    const double r = std::sqrt(a * a + b * b) - 2.0;
    return std::pow(1.0 + r * r, -10.0);
  };
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nvel(); ++j) {
      const double v1 = grid.velocity(j, 0), v2 = grid.velocity(j, 1);
      f(i, j) = 1.5 * ring(v1 - 2.0, v2 - 2.0) + 2.0 * ring(v1 + 2.0, v2 + 2.0);
    }
  return f;
}

/// 1d_x x 2d_v data: rho0/(4 pi) times four Gaussians centred at (+-2, +-2).
inline InitialState ap_2d(const PhaseGrid& grid) {
  if (grid.dim != 2) throw Error("ap_2d: needs d = 2");
  InitialState s{DistributionField(grid), {}, {}, {}};
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double rho = 0.5 * kSqrt2Pi * (2.0 + std::cos(2.0 * std::numbers::pi * x));
    s.background.push_back(two_stream_background(x));
    for (std::size_t j = 0; j < s.f.nvel(); ++j) {
      const double v1 = grid.velocity(j, 0), v2 = grid.velocity(j, 1);
      s.f(static_cast<std::size_t>(i), j) =
          rho / (4.0 * std::numbers::pi) *
          (detail::bump2(v1, v2, 2, 2) + detail::bump2(v1, v2, -2, -2) +
           detail::bump2(v1, v2, -2, 2) + detail::bump2(v1, v2, 2, -2));
    }
  }
  return s;
}

/// Homogeneous double Gaussian in d = 3.
inline DistributionField double_gaussian_3d(const PhaseGrid& grid) {
  if (grid.dim != 3) throw Error("double_gaussian_3d: needs d = 3");
  DistributionField f(grid);
  const double c = std::pow(2.0 * std::numbers::pi, -1.5);
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nvel(); ++j) {
      const double v1 = grid.velocity(j, 0), v2 = grid.velocity(j, 1), v3 = grid.velocity(j, 2);
      f(i, j) = c * (std::exp(-(v1 - 1) * (v1 - 1) - (v2 + 1) * (v2 + 1) - 0.5 * v3 * v3) +
                     std::exp(-(v1 + 1) * (v1 + 1) - (v2 - 1) * (v2 - 1) - 0.5 * v3 * v3));
    }
  return f;
}

/// Standard Maxwellian rho (2 pi)^{-d/2} exp(-|v|^2/2) at every node.
inline DistributionField maxwellian(const PhaseGrid& grid, double rho = 1.0) {
  DistributionField f(grid);
  const double c = rho / std::pow(kSqrt2Pi, grid.dim);
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nvel(); ++j) {
      double r2 = 0.0;
      for (int l = 0; l < grid.dim; ++l) r2 += grid.velocity(j, l) * grid.velocity(j, l);
      f(i, j) = c * std::exp(-0.5 * r2);
    }
  return f;
}

}  // namespace ic
}  // namespace vpfp
