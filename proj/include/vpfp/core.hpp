#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpfp {

/// Base class for every error raised by the solver.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a routine that needs f > 0 receives a non-positive entry.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

inline constexpr int kMaxVelocityDim = 3;

/**
 * Tensor-product phase-space grid: a periodic spatial axis and a truncated
 * velocity box [-L_v, L_v]^d with zero-flux walls.
 *
 * Spatial nodes sit at x_i = x_center - L_x + i*dx for i = 1..N_x, so the
 * last node lies on the right edge and is the periodic image of the left
 * one. Velocity nodes are cell centers v_j = -L_v + (j - 1/2) dv.
 * Internally all indices are 0-based; the first velocity axis is fastest.
 */
struct PhaseGrid {
  double x_center = 0.0;
  double half_width_x = 1.0;
  int nx = 1;
  double half_width_v = 1.0;
  int nv = 2;
  int dim = 1;

  static PhaseGrid make(double x_center, double half_width_x, int nx,
                        double half_width_v, int nv, int dim) {
    PhaseGrid g{x_center, half_width_x, nx, half_width_v, nv, dim};
    g.validate();
    return g;
  }

  /// Single spatial node with unit x-measure, for spatially homogeneous runs.
  static PhaseGrid homogeneous(double half_width_v, int nv, int dim) {
    return make(0.0, 0.5, 1, half_width_v, nv, dim);
  }

  void validate() const {
    if (!(half_width_x > 0.0) || nx < 1)
      throw Error("PhaseGrid: spatial extent and N_x must be positive");
    if (!(half_width_v > 0.0) || nv < 2)
      throw Error("PhaseGrid: velocity extent must be positive and N_v >= 2");
    if (dim < 1 || dim > kMaxVelocityDim)
      throw Error("PhaseGrid: velocity dimension must be 1, 2 or 3");
  }

  double dx() const { return 2.0 * half_width_x / nx; }
  double dv() const { return 2.0 * half_width_v / nv; }
  double x_lo() const { return x_center - half_width_x; }
  double length_x() const { return 2.0 * half_width_x; }

  double x(int i) const { return x_lo() + (i + 1) * dx(); }
  double v_axis(int j) const { return -half_width_v + (j + 0.5) * dv(); }

  std::size_t velocity_size() const {
    std::size_t n = 1;
    for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(nv);
    return n;
  }
  std::size_t size() const { return velocity_size() * static_cast<std::size_t>(nx); }

  /// dv^d, the velocity cell measure.
  double velocity_cell() const { return std::pow(dv(), dim); }

  /// Component `axis` of the velocity node with flat (0-based) index j.
  double velocity(std::size_t j, int axis) const {
    for (int k = 0; k < axis; ++k) j /= static_cast<std::size_t>(nv);
    return v_axis(static_cast<int>(j % static_cast<std::size_t>(nv)));
  }

  /// Largest |v_1| on the grid, the transport speed bound.
  double max_speed() const { return half_width_v - 0.5 * dv(); }

  bool same_shape(const PhaseGrid& o) const {
    return nx == o.nx && nv == o.nv && dim == o.dim;
  }
};

/// Row-major per spatial node: values[i * velocity_size() + j].
class DistributionField {
 public:
  DistributionField() = default;
  explicit DistributionField(const PhaseGrid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}

  const PhaseGrid& grid() const { return grid_; }
  std::size_t nx() const { return static_cast<std::size_t>(grid_.nx); }
  std::size_t nvel() const { return grid_.velocity_size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * nvel() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * nvel() + j]; }

  std::span<double> node(std::size_t i) { return {values_.data() + i * nvel(), nvel()}; }
  std::span<const double> node(std::size_t i) const {
    return {values_.data() + i * nvel(), nvel()};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Sum f dx dv^d.
  double mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.dx() * grid_.velocity_cell();
  }

  double min() const {
    double m = values_.empty() ? 0.0 : values_.front();
    for (double v : values_) m = std::min(m, v);
    return m;
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  PhaseGrid grid_{};
  std::vector<double> values_;
};

enum class Algorithm { fixed_step, line_search };
enum class LinearSolverKind { direct, conjugate_gradient };
enum class Mode { full, vfp, homogeneous };

inline std::string to_string(Algorithm a) {
  return a == Algorithm::fixed_step ? "fixed" : "linesearch";
}

/// Inner optimizer settings for one implicit collision step.
struct CollisionParams {
  Algorithm algorithm = Algorithm::line_search;
  double gamma = 0.5;     // fixed step size
  double theta = 0.01;    // sufficient-decrease parameter
  double tol = 1e-7;      // stopping tolerance delta
  int max_iter = 1000;
  double positivity_floor = 1e-14;
  LinearSolverKind linear_solver = LinearSolverKind::direct;

  void validate() const {
    if (!(gamma > 0.0)) throw Error("collision: gamma must be positive");
    if (!(theta > 0.0 && theta < 0.5)) throw Error("collision: theta must lie in (0, 1/2)");
    if (!(tol > 0.0)) throw Error("collision: tolerance must be positive");
    if (max_iter < 1) throw Error("collision: max_iter must be >= 1");
    if (!(positivity_floor > 0.0)) throw Error("collision: positivity floor must be positive");
  }
};

/**
 * Everything the time loop needs besides the grid and the initial field.
 * `epsilon` holds one value per spatial node; `background` is h(x_i).
 * In vfp mode `external_field` holds d(phi_0)/dx at the nodes.
 */
struct SolverConfig {
  Mode mode = Mode::full;
  std::vector<double> epsilon;
  double tau = 0.0;
  double final_time = 0.0;
  CollisionParams collision;
  std::vector<double> background;
  std::vector<double> external_field;
  double cfl_limit = 1.0;
  bool allow_cfl_violation = false;
  int workers = 1;
  int snapshot_every = 0;  // 0: initial and final only

  void validate(const PhaseGrid& grid) const {
    collision.validate();
    if (!(tau > 0.0)) throw Error("config: tau must be positive");
    if (!(final_time >= 0.0)) throw Error("config: final time must be non-negative");
    if (epsilon.size() != static_cast<std::size_t>(grid.nx))
      throw Error("config: epsilon must have one entry per spatial node");
    for (double e : epsilon)
      if (!(e > 0.0)) throw Error("config: epsilon must be positive everywhere");
    if (mode == Mode::full && background.size() != static_cast<std::size_t>(grid.nx))
      throw Error("config: background density must have one entry per spatial node");
    if (mode == Mode::vfp && external_field.size() != static_cast<std::size_t>(grid.nx))
      throw Error("config: external field must have one entry per spatial node");
    if (workers < 1) throw Error("config: workers must be >= 1");
  }
};

inline std::vector<double> constant_epsilon(const PhaseGrid& grid, double eps) {
  return std::vector<double>(static_cast<std::size_t>(grid.nx), eps);
}

/// rho_i = sum_j f_ij dv^d (midpoint rule).
inline std::vector<double> density(const DistributionField& f) {
  const auto& g = f.grid();
  std::vector<double> rho(f.nx(), 0.0);
  const double cell = g.velocity_cell();
  for (std::size_t i = 0; i < f.nx(); ++i) {
    double s = 0.0;
    for (double v : f.node(i)) s += v;
    rho[i] = s * cell;
  }
  return rho;
}

/// J_{i,l} = sum_j (v_j)_l f_ij dv^d, stored as J[i * d + l].
inline std::vector<double> current(const DistributionField& f) {
  const auto& g = f.grid();
  const auto d = static_cast<std::size_t>(g.dim);
  std::vector<double> J(f.nx() * d, 0.0);
  const double cell = g.velocity_cell();
  for (std::size_t i = 0; i < f.nx(); ++i) {
    auto row = f.node(i);
    for (std::size_t j = 0; j < row.size(); ++j)
      for (std::size_t l = 0; l < d; ++l)
        J[i * d + l] += g.velocity(j, static_cast<int>(l)) * row[j];
    for (std::size_t l = 0; l < d; ++l) J[i * d + l] *= cell;
  }
  return J;
}

struct MomentSet {
  std::vector<double> rho;      // N_x
  std::vector<double> current;  // N_x * d
  std::vector<double> second;   // N_x * d * d, diagnostic only
};

inline MomentSet moments(const DistributionField& f) {
  MomentSet m{density(f), current(f), {}};
  const auto& g = f.grid();
  const auto d = static_cast<std::size_t>(g.dim);
  m.second.assign(f.nx() * d * d, 0.0);
  const double cell = g.velocity_cell();
  for (std::size_t i = 0; i < f.nx(); ++i) {
    auto row = f.node(i);
    for (std::size_t j = 0; j < row.size(); ++j)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          m.second[(i * d + a) * d + b] += g.velocity(j, static_cast<int>(a)) *
                                           g.velocity(j, static_cast<int>(b)) * row[j] * cell;
  }
  return m;
}

// Velocity multi-index linearization. The public pair uses 1-based indices,
// j = j_1 + (j_2 - 1) N_v + (j_3 - 1) N_v^2, which matches the Kronecker
// ordering of the divergence blocks (first axis fastest).

inline std::size_t linearize_index(std::span<const int> multi, int nv) {
  if (multi.empty() || multi.size() > kMaxVelocityDim)
    throw std::out_of_range("linearize_index: dimension must be 1..3");
  if (nv < 1) throw std::out_of_range("linearize_index: N_v must be positive");
  std::size_t j = 0;
  std::size_t stride = 1;
  for (int jk : multi) {
    if (jk < 1 || jk > nv) throw std::out_of_range("linearize_index: index out of range");
    j += static_cast<std::size_t>(jk - 1) * stride;
    stride *= static_cast<std::size_t>(nv);
  }
  return j + 1;
}

inline std::vector<int> delinearize_index(std::size_t j, int nv, int d) {
  if (d < 1 || d > kMaxVelocityDim) throw std::out_of_range("delinearize_index: bad dimension");
  if (nv < 1) throw std::out_of_range("delinearize_index: N_v must be positive");
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(nv);
  if (j < 1 || j > total) throw std::out_of_range("delinearize_index: index out of range");
  std::vector<int> multi(static_cast<std::size_t>(d));
  std::size_t r = j - 1;
  for (int k = 0; k < d; ++k) {
    multi[static_cast<std::size_t>(k)] = static_cast<int>(r % static_cast<std::size_t>(nv)) + 1;
    r /= static_cast<std::size_t>(nv);
  }
  return multi;
}

}  // namespace vpfp
