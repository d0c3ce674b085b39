#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vpfp/poisson.hpp"

using namespace vpfp;

TEST(Poisson, SingleModeIsExact) {
  // -phi'' = A cos(2 pi k x / L)  =>  phi = A (L / 2 pi k)^2 cos(.)
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 64, 1.0, 2, 1);
  const double A = 0.8, kappa = 2 * std::numbers::pi * 3;
  std::vector<double> rho(64), h(64, 1.0);
  for (int i = 0; i < 64; ++i) rho[static_cast<std::size_t>(i)] = 1.0 + A * std::cos(kappa * g.x(i));
  const auto s = solve_poisson(rho, h, g);
  for (int i = 0; i < 64; ++i) {
    const auto k = static_cast<std::size_t>(i);
    EXPECT_NEAR(s.potential[k], A / (kappa * kappa) * std::cos(kappa * g.x(i)), 1e-14);
    EXPECT_NEAR(s.gradient[k], -A / kappa * std::sin(kappa * g.x(i)), 1e-13);
  }
  EXPECT_NEAR(s.projected_mean, 0.0, 1e-14);
}

TEST(Poisson, ScalesWithDomainLength) {
  const PhaseGrid g = PhaseGrid::make(0.0, 1.0, 50, 1.0, 2, 1);  // [-1, 1]
  const double kappa = std::numbers::pi;
  std::vector<double> rho(50), h(50, 0.0);
  for (int i = 0; i < 50; ++i) rho[static_cast<std::size_t>(i)] = std::sin(kappa * g.x(i));
  const auto s = solve_poisson(rho, h, g);
  for (int i = 0; i < 50; ++i)
    EXPECT_NEAR(s.gradient[static_cast<std::size_t>(i)], std::cos(kappa * g.x(i)) / kappa, 1e-13);
}

TEST(Poisson, NeutralStateHasNoField) {
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 32, 1.0, 2, 1);
  std::vector<double> rho(32);
  for (int i = 0; i < 32; ++i) rho[static_cast<std::size_t>(i)] = std::exp(std::cos(2 * std::numbers::pi * g.x(i)));
  const auto s = solve_poisson(rho, rho, g);
  for (double e : s.gradient) EXPECT_EQ(e, 0.0);
}

TEST(Poisson, ProjectsMeanMismatch) {
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 16, 1.0, 2, 1);
  std::vector<double> rho(16, 2.0), h(16, 1.5);
  const auto s = solve_poisson(rho, h, g);
  EXPECT_NEAR(s.projected_mean, 0.5, 1e-15);
  for (double e : s.gradient) EXPECT_NEAR(e, 0.0, 1e-15);
}

TEST(Poisson, GradientIsDerivativeOfPotential) {
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 128, 1.0, 2, 1);
  std::vector<double> rho(128), h(128);
  for (int i = 0; i < 128; ++i) {
    const double x = g.x(i);
    rho[static_cast<std::size_t>(i)] = 2.0 + std::cos(2 * std::numbers::pi * x);
    h[static_cast<std::size_t>(i)] = std::exp(std::cos(2 * std::numbers::pi * x));
  }
  const auto s = solve_poisson(rho, h, g);
  const auto ds = solve_poisson(s.gradient, std::vector<double>(128, 0.0), g);
  // psi with -psi'' = phi' has psi' = -phi (both zero mean)
  for (int i = 0; i < 128; ++i)
    EXPECT_NEAR(ds.gradient[static_cast<std::size_t>(i)], -s.potential[static_cast<std::size_t>(i)], 1e-12);
}

TEST(Poisson, SizeMismatch) {
  const PhaseGrid g = PhaseGrid::make(0.5, 0.5, 8, 1.0, 2, 1);
  std::vector<double> rho(8), h(7);
  EXPECT_THROW(solve_poisson(rho, h, g), Error);
}
