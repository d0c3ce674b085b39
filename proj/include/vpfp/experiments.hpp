#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "vpfp/collision/jko.hpp"
#include "vpfp/core.hpp"
#include "vpfp/diagnostics.hpp"
#include "vpfp/initial_conditions.hpp"
#include "vpfp/io.hpp"
#include "vpfp/reference_solvers.hpp"
#include "vpfp/scheme.hpp"

namespace vpfp::experiments {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Grid on x in [0, 1].
inline PhaseGrid unit_interval_grid(int nx, double half_width_v, int nv, int dim = 1) {
  return PhaseGrid::make(0.5, 0.5, nx, half_width_v, nv, dim);
}

/// Step size used with Algorithm 1 in the homogeneous studies.
inline double default_gamma(double eps) { return eps > 5e-3 ? 0.5 : 0.4; }

inline DistributionField homogeneous_profile(const PhaseGrid& grid) {
  switch (grid.dim) {
    case 1: return ic::double_bump(grid);
    case 2: return ic::four_bump_2d(grid);
    default: return ic::double_gaussian_3d(grid);
  }
}

inline SolverConfig make_config(const PhaseGrid& grid, Mode mode, double eps, double tau,
                                double final_time, const CollisionParams& collision, int workers) {
  SolverConfig c;
  c.mode = mode;
  c.epsilon = constant_epsilon(grid, eps);
  c.tau = tau;
  c.final_time = final_time;
  c.collision = collision;
  c.workers = workers;
  return c;
}

// ---------------------------------------------------------------- optimizer

struct OptimizerStudy {
  int dim = 1;
  double half_width_v = 5.0;
  int nv = 64;
  double tau = 0.05;
  double tol = 1e-7;
  double theta = 0.01;
  int max_iter = 1000;
  int reference_iterations = 160;
};

struct OptimizerTrace {
  Algorithm algorithm = Algorithm::line_search;
  double epsilon = 1.0;
  int nv = 0;
  double tau = 0.0;
  double gamma = 0.0;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  std::vector<double> errors;  // error_k for k = 0 .. iterations
};

/**
 * One collision step on the homogeneous profile. error_k is measured
 * against a reference from `reference_iterations` fixed-step iterations.
 */
inline OptimizerTrace optimizer_trace(const OptimizerStudy& s, Algorithm alg, double eps,
                                      double gamma) {
  const PhaseGrid grid = PhaseGrid::homogeneous(s.half_width_v, s.nv, s.dim);
  const DistributionField f0 = homogeneous_profile(grid);
  const auto rho = density(f0);
  const auto M = local_maxwellian(rho[0], std::vector<double>(static_cast<std::size_t>(s.dim), 0.0), grid);
  JkoSolver solver(build_divergence_operator(grid.dim, grid.nv, grid.dv()));

  CollisionParams ref;
  ref.algorithm = Algorithm::fixed_step;
  ref.gamma = gamma;
  ref.tol = s.tol;
  ref.max_iter = s.reference_iterations;
  const Eigen::VectorXd u_star =
      solver.solve(f0.node(0), M, eps, s.tau, ref, {false, false, true}).u;

  CollisionParams p = ref;
  p.algorithm = alg;
  p.theta = s.theta;
  p.max_iter = s.max_iter;
  const auto t0 = Clock::now();
  const JkoResult r = solver.solve(f0.node(0), M, eps, s.tau, p, {false, true, false});
  OptimizerTrace out;
  out.seconds = seconds_since(t0);
  out.algorithm = alg;
  out.epsilon = eps;
  out.nv = s.nv;
  out.tau = s.tau;
  out.gamma = gamma;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.errors = optimizer_error_trace(r.iterates, u_star);
  return out;
}

/// Wall-clock of one outer step (median of `repeats`), without recording.
inline double outer_step_seconds(const OptimizerStudy& s, Algorithm alg, double eps, double gamma,
                                 int repeats = 5) {
  const PhaseGrid grid = PhaseGrid::homogeneous(s.half_width_v, s.nv, s.dim);
  CollisionParams p;
  p.algorithm = alg;
  p.gamma = gamma;
  p.theta = s.theta;
  p.tol = s.tol;
  p.max_iter = s.max_iter;
  const SolverConfig config = make_config(grid, Mode::homogeneous, eps, s.tau, s.tau, p, 1);
  const DistributionField f0 = homogeneous_profile(grid);
  std::vector<double> times;
  for (int k = 0; k < std::max(1, repeats); ++k) {
    const auto t0 = Clock::now();
    Scheme scheme(grid, config);
    (void)scheme.step(f0, s.tau);
    times.push_back(seconds_since(t0));
  }
  std::nth_element(times.begin(), times.begin() + static_cast<long>(times.size() / 2), times.end());
  return times[times.size() / 2];
}

/// Inner iteration counts of successive outer steps.
inline std::vector<int> iterations_per_step(const OptimizerStudy& s, Algorithm alg, double eps,
                                            double gamma, int steps) {
  const PhaseGrid grid = PhaseGrid::homogeneous(s.half_width_v, s.nv, s.dim);
  CollisionParams p;
  p.algorithm = alg;
  p.gamma = gamma;
  p.theta = s.theta;
  p.tol = s.tol;
  p.max_iter = s.max_iter;
  const SolverConfig config = make_config(grid, Mode::homogeneous, eps, s.tau, steps * s.tau, p, 1);
  std::vector<int> out;
  run(grid, config, homogeneous_profile(grid),
      [&](long, const DistributionField&, const StepReport& r) { out.push_back(r.max_iterations); });
  return out;
}

// ---------------------------------------------------------------- accuracy

struct AccuracyVStudy {
  double half_width_v = 5.0;
  std::vector<int> nvs{64, 128, 256, 512, 1024};
  double tau = 0.0063;
  double final_time = 0.1;
  CollisionParams collision{};
};

inline RichardsonResult accuracy_v(const AccuracyVStudy& s, double eps) {
  if (s.nvs.size() < 2) throw Error("accuracy_v: needs at least two velocity grids");
  std::vector<DistributionField> finals;
  std::vector<double> params;
  for (int nv : s.nvs) {
    const PhaseGrid grid = PhaseGrid::homogeneous(s.half_width_v, nv, 1);
    const SolverConfig c =
        make_config(grid, Mode::homogeneous, eps, s.tau, s.final_time, s.collision, 1);
    finals.push_back(run(grid, c, ic::double_bump(grid)).final_state);
    params.push_back(grid.dv());
  }
  return richardson_errors(Refinement::velocity, finals, params);
}

struct AccuracyXtStudy {
  double final_time = 0.1;
  CollisionParams collision{};
  int workers = 1;
  // time refinement
  int nx_time = 16;
  double half_width_v_time = 6.0;
  int nv_time = 64;
  std::vector<int> tau_divisors{8, 16, 32, 64, 128};
  // space refinement
  std::vector<int> nxs{16, 32, 64, 128, 256};
  double half_width_v_space = 5.0;
  int nv_space = 64;
  int tau_divisor_space = 8;
};

inline DistributionField two_stream_final(const PhaseGrid& grid, double eps, double tau,
                                          double final_time, const CollisionParams& collision,
                                          int workers) {
  InitialState init = ic::two_stream(grid);
  SolverConfig c = make_config(grid, Mode::full, eps, tau, final_time, collision, workers);
  c.background = init.background;
  return run(grid, c, std::move(init.f)).final_state;
}

inline RichardsonResult accuracy_tau(const AccuracyXtStudy& s, double eps) {
  if (s.tau_divisors.size() < 2) throw Error("accuracy_tau: needs at least two time steps");
  const PhaseGrid grid = unit_interval_grid(s.nx_time, s.half_width_v_time, s.nv_time);
  std::vector<DistributionField> finals;
  std::vector<double> params;
  for (int div : s.tau_divisors) {
    const double tau = grid.dx() / div;
    finals.push_back(two_stream_final(grid, eps, tau, s.final_time, s.collision, s.workers));
    params.push_back(tau);
  }
  return richardson_errors(Refinement::time, finals, params);
}

inline RichardsonResult accuracy_x(const AccuracyXtStudy& s, double eps) {
  if (s.nxs.size() < 2) throw Error("accuracy_x: needs at least two spatial grids");
  std::vector<DistributionField> finals;
  std::vector<double> params;
  for (int nx : s.nxs) {
    const PhaseGrid grid = unit_interval_grid(nx, s.half_width_v_space, s.nv_space);
    const double tau = grid.dx() / s.tau_divisor_space;
    finals.push_back(two_stream_final(grid, eps, tau, s.final_time, s.collision, s.workers));
    params.push_back(grid.dx());
  }
  return richardson_errors(Refinement::space, finals, params);
}

// ---------------------------------------------------------------- AP property

struct ApStudy {
  int dim = 1;
  int nx = 64;
  double half_width_v = 6.0;
  int nv = 64;
  double tau = 1.0 / 1024.0;
  double final_time = 0.1;
  CollisionParams collision{};
  int workers = 1;

  static ApStudy two_dimensional() {
    ApStudy s;
    s.dim = 2;
    s.nx = 16;
    s.half_width_v = 5.0;
    s.nv = 40;
    s.tau = 0.0078;
    return s;
  }
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;

  /// Value at the sample closest to time `at`.
  double nearest(double at) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < t.size(); ++k)
      if (std::abs(t[k] - at) < std::abs(t[best] - at)) best = k;
    return value.at(best);
  }
};

/// ||f^n - M^n||_1 per step, M^n the local Maxwellian of f^n and its own field.
inline TimeSeries ap_distance(const ApStudy& s, double eps) {
  const PhaseGrid grid = unit_interval_grid(s.nx, s.half_width_v, s.nv, s.dim);
  InitialState init = s.dim == 1 ? ic::two_stream(grid) : ic::ap_2d(grid);
  SolverConfig c = make_config(grid, Mode::full, eps, s.tau, s.final_time, s.collision, s.workers);
  c.background = init.background;
  Scheme probe(grid, c);
  TimeSeries out;
  auto record = [&](double t, const DistributionField& f) {
    out.t.push_back(t);
    out.value.push_back(l1_distance_to_equilibrium(f, local_equilibrium(f, probe.field(f))));
  };
  record(0.0, init.f);
  run(grid, c, init.f, [&](long, const DistributionField& f, const StepReport& r) { record(r.time, f); });
  return out;
}

/**
 * L1 distance in density between the kinetic scheme and the high-field
 * limit solver, both started from the two-stream data.
 */
inline double limit_consistency(double eps, int nx, double half_width_v, int nv, double tau,
                                double final_time, const CollisionParams& collision, int workers = 1) {
  const PhaseGrid grid = unit_interval_grid(nx, half_width_v, nv);
  InitialState init = ic::two_stream(grid);
  SolverConfig c = make_config(grid, Mode::full, eps, tau, final_time, collision, workers);
  c.background = init.background;
  std::vector<double> rho = density(init.f);
  const auto kinetic = density(run(grid, c, init.f).final_state);
  for (double h : step_schedule(final_time, tau)) rho = high_field_limit_step(rho, init.background, grid, h);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += std::abs(rho[i] - kinetic[i]);
  return s * grid.dx();
}

// ---------------------------------------------------------------- entropy

struct EntropyVfpStudy {
  std::vector<int> nxs{32, 64};
  double half_width_v = 6.0;
  int nv = 64;
  double tau_divisor = 15.0;
  double final_time = 2.0;
  CollisionParams collision{};
  int workers = 1;
};

/// E(f(t) | f_inf) for the VFP problem with phi_0 = sin(2 pi x) / 5.
inline TimeSeries entropy_vfp(const EntropyVfpStudy& s, int nx) {
  const PhaseGrid grid = unit_interval_grid(nx, s.half_width_v, s.nv);
  InitialState init = ic::vfp(grid);
  SolverConfig c = make_config(grid, Mode::vfp, 1.0, grid.dx() / s.tau_divisor, s.final_time,
                               s.collision, s.workers);
  c.external_field = init.external_field;
  const DistributionField f_inf =
      vfp_global_equilibrium(ic::vfp_potential, grid, 2.0 * ic::kSqrt2Pi);
  TimeSeries out;
  out.t.push_back(0.0);
  out.value.push_back(relative_entropy(init.f, f_inf));
  run(grid, c, init.f, [&](long, const DistributionField& f, const StepReport& r) {
    out.t.push_back(r.time);
    out.value.push_back(relative_entropy(f, f_inf));
  });
  return out;
}

struct EntropyVpfpStudy {
  int nx = 32;
  double half_width_v = 6.0;
  int nv = 64;
  double tau_divisor = 16.0;
  double equilibrium_time = 5.0;
  double report_time = 2.0;
  CollisionParams collision{};
  int workers = 1;
};

/// E(f(t) | f_inf) for VPFP at eps = 1, f_inf being the state at equilibrium_time.
inline TimeSeries entropy_vpfp(const EntropyVpfpStudy& s) {
  const PhaseGrid grid = unit_interval_grid(s.nx, s.half_width_v, s.nv);
  InitialState init = ic::two_stream(grid);
  SolverConfig c = make_config(grid, Mode::full, 1.0, grid.dx() / s.tau_divisor,
                               s.equilibrium_time, s.collision, s.workers);
  c.background = init.background;
  std::vector<double> times{0.0};
  std::vector<DistributionField> states{init.f};
  const RunResult r = run(grid, c, init.f, [&](long, const DistributionField& f, const StepReport& rep) {
    if (rep.time <= s.report_time + 1e-12) {
      times.push_back(rep.time);
      states.push_back(f);
    }
  });
  TimeSeries out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    out.t.push_back(times[k]);
    out.value.push_back(relative_entropy(states[k], r.final_state));
  }
  return out;
}

// ---------------------------------------------------------------- mixing regime

struct MixingStudy {
  int nx = 100;
  int nx_reference = 2000;
  double half_width_v = 6.0;
  int nv = 64;
  double tau_divisor = 15.0;
  double tau_reference = 7.0313e-6;
  double eps0 = 1e-3;
  std::vector<double> times{0.2, 0.3};
  CollisionParams collision{};
  int workers = 1;
};

struct MixingProfile {
  double time = 0.0;
  std::vector<double> x;
  std::vector<double> rho_scheme;
  std::vector<double> rho_reference;  // sampled at the scheme's nodes
  double max_discrepancy = 0.0;
};

/// x in [-1, 1], so dx = 2 / N_x.
inline PhaseGrid mixing_grid(int nx, double half_width_v, int nv) {
  return PhaseGrid::make(0.0, 1.0, nx, half_width_v, nv, 1);
}

inline std::vector<MixingProfile> mixing(const MixingStudy& s,
                                         const std::function<void(const std::string&)>& progress = {}) {
  if (s.nx_reference % s.nx != 0) throw Error("mixing: reference N_x must be a multiple of N_x");
  const int stride = s.nx_reference / s.nx;
  std::vector<double> times = s.times;
  std::sort(times.begin(), times.end());

  const PhaseGrid grid = mixing_grid(s.nx, s.half_width_v, s.nv);
  InitialState init = ic::mixing(grid, s.eps0);
  SolverConfig c = make_config(grid, Mode::full, 1.0, grid.dx() / s.tau_divisor, 0.0, s.collision,
                               s.workers);
  c.epsilon = init.epsilon;
  c.background = init.background;

  const PhaseGrid rgrid = mixing_grid(s.nx_reference, s.half_width_v, s.nv);
  InitialState rinit = ic::mixing(rgrid, s.eps0);
  SolverConfig rc = make_config(rgrid, Mode::full, 1.0, s.tau_reference, 0.0, s.collision, 1);
  rc.epsilon = rinit.epsilon;
  rc.background = rinit.background;
  const ExplicitSolver oracle(rgrid, rc);

  std::vector<MixingProfile> out;
  DistributionField f = init.f, g = rinit.f;
  double t = 0.0;
  for (double target : times) {
    c.final_time = target - t;
    f = run(grid, c, f).final_state;
    g = oracle.advance(g, target - t, s.tau_reference);
    t = target;
    MixingProfile p;
    p.time = target;
    const auto rho = density(f), rrho = density(g);
    for (int i = 0; i < grid.nx; ++i) {
      p.x.push_back(grid.x(i));
      p.rho_scheme.push_back(rho[static_cast<std::size_t>(i)]);
      const double ref = rrho[static_cast<std::size_t>((i + 1) * stride - 1)];
      p.rho_reference.push_back(ref);
      p.max_discrepancy = std::max(p.max_discrepancy, std::abs(ref - rho[static_cast<std::size_t>(i)]));
    }
    if (progress) progress("mixing: reached t = " + format_double(target));
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------- 2D / 3D evolution

struct EvolveStudy {
  int dim = 2;
  double half_width_v = 5.0;
  int nv = 40;
  double tau = 0.05;
  double epsilon = 0.2;
  double final_time = 2.0;
  int snapshot_every = 10;
  CollisionParams collision{};

  static EvolveStudy three_dimensional() {
    EvolveStudy s;
    s.dim = 3;
    s.half_width_v = 4.0;
    s.nv = 16;
    s.final_time = 2.1;
    s.snapshot_every = 3;
    return s;
  }
};

struct EvolveRecord {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  double min_f = 0.0;
  double entropy = 0.0;  // E(f | M) against the equilibrium Maxwellian
  int iterations = 0;
};

struct EvolveResult {
  std::vector<EvolveRecord> records;
  std::vector<Snapshot> snapshots;
};

inline EvolveResult evolve(const EvolveStudy& s) {
  const PhaseGrid grid = PhaseGrid::homogeneous(s.half_width_v, s.nv, s.dim);
  const DistributionField f0 = s.dim == 2 ? ic::semi_torus_2d(grid) : ic::double_gaussian_3d(grid);
  const DistributionField M = local_equilibrium(f0, std::vector<double>{0.0});
  SolverConfig c = make_config(grid, Mode::homogeneous, s.epsilon, s.tau, s.final_time, s.collision, 1);
  c.snapshot_every = s.snapshot_every;
  EvolveResult out;
  out.records.push_back({0, 0.0, f0.mass(), f0.min(), relative_entropy(f0, M), 0});
  RunResult r = run(grid, c, f0, [&](long k, const DistributionField& f, const StepReport& rep) {
    out.records.push_back({k, rep.time, rep.mass, rep.min_f, relative_entropy(f, M), rep.max_iterations});
  });
  out.snapshots = std::move(r.snapshots);
  return out;
}

}  // namespace vpfp::experiments
