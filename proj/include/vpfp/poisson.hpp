#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vpfp/core.hpp"

namespace vpfp {

struct PoissonSolution {
  std::vector<double> potential;  // phi, zero mean
  std::vector<double> gradient;   // d(phi)/dx
  double projected_mean = 0.0;    // mean of rho - h removed before solving
};

/**
 * Spectral solve of -phi'' = rho - h on the periodic spatial grid.
 * The k = 0 mode of the source is projected out and phi is fixed to zero
 * mean. For even N_x the Nyquist mode of the derivative is dropped.
 */
inline PoissonSolution solve_poisson(std::span<const double> rho, std::span<const double> h,
                                     const PhaseGrid& grid) {
  const std::size_t n = rho.size();
  if (n != static_cast<std::size_t>(grid.nx) || h.size() != n)
    throw Error("solve_poisson: source arrays must have N_x entries");

  PoissonSolution out;
  out.potential.assign(n, 0.0);
  out.gradient.assign(n, 0.0);
  if (n == 0) return out;

  std::vector<std::complex<double>> src(n), spec(n), back(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += rho[i] - h[i];
  mean /= static_cast<double>(n);
  out.projected_mean = mean;
  for (std::size_t i = 0; i < n; ++i) src[i] = rho[i] - h[i] - mean;
  if (n == 1) return out;

  Eigen::FFT<double> fft;
  fft.fwd(spec, src);

  const double base = 2.0 * std::numbers::pi / grid.length_x();
  std::vector<std::complex<double>> phi_hat(n), grad_hat(n);
  for (std::size_t k = 0; k < n; ++k) {
    // signed wavenumber index
    const long kk = (k <= n / 2) ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    if (kk == 0) continue;
    const double kappa = base * static_cast<double>(kk);
    phi_hat[k] = spec[k] / (kappa * kappa);
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    grad_hat[k] = nyquist ? std::complex<double>(0.0) : std::complex<double>(0.0, kappa) * phi_hat[k];
  }

  fft.inv(back, phi_hat);
  for (std::size_t i = 0; i < n; ++i) out.potential[i] = back[i].real();
  fft.inv(back, grad_hat);
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = back[i].real();
  return out;
}

}  // namespace vpfp
