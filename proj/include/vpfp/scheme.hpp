#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vpfp/collision/collision_step.hpp"
#include "vpfp/core.hpp"
#include "vpfp/poisson.hpp"
#include "vpfp/transport.hpp"

namespace vpfp {

class RunError : public Error {
 public:
  RunError(long step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct StepReport {
  double time = 0.0;
  double tau = 0.0;
  double mass = 0.0;
  double min_f = 0.0;
  int max_iterations = 0;
  int not_converged = 0;
  std::vector<double> rho;
  std::vector<double> potential;
  std::vector<double> gradient;  // d(phi)/dx used by the collision step
};

/**
 * The IMEX scheme: MUSCL transport, then the field (Poisson solve, fixed
 * external field, or none), then the implicit collision step per node.
 */
class Scheme {
 public:
  Scheme(const PhaseGrid& grid, SolverConfig config)
      : grid_(grid), config_(std::move(config)), collision_(grid, config_.collision, config_.workers) {
    config_.validate(grid_);
    if (config_.mode == Mode::full && config_.background.empty())
      throw Error("scheme: full mode needs a background density");
    if (config_.mode == Mode::vfp && config_.external_field.empty())
      throw Error("scheme: vfp mode needs an external field");
  }

  const PhaseGrid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }

  /// Field d(phi)/dx for the density of f (zero in homogeneous mode).
  std::vector<double> field(const DistributionField& f, std::vector<double>* potential = nullptr) const {
    const std::size_t nx = f.nx();
    switch (config_.mode) {
      case Mode::homogeneous:
        if (potential) potential->assign(nx, 0.0);
        return std::vector<double>(nx, 0.0);
      case Mode::vfp:
        if (potential) potential->clear();
        return config_.external_field;
      case Mode::full: {
        auto ps = solve_poisson(density(f), config_.background, grid_);
        if (potential) *potential = std::move(ps.potential);
        return ps.gradient;
      }
    }
    return {};
  }

  DistributionField step(const DistributionField& f, double tau, StepReport* report = nullptr) {
    if (!f.all_finite()) throw Error("vpfp_step: non-finite input");
    if (f.min() < 0.0) throw PositivityViolation("vpfp_step: negative input");
    DistributionField f_star =
        config_.mode == Mode::homogeneous
            ? f
            : transport_step(f, tau, {config_.cfl_limit, config_.allow_cfl_violation});
    std::vector<double> potential;
    const std::vector<double> grad = field(f_star, &potential);
    const std::vector<double> rho = density(f_star);
    CollisionStats stats;
    DistributionField next = collision_.apply(f_star, rho, grad, config_.epsilon, tau, &stats);
    if (report) {
      report->tau = tau;
      report->mass = next.mass();
      report->min_f = next.min();
      report->max_iterations = stats.max_iterations();
      report->not_converged = stats.not_converged;
      report->rho = rho;
      report->potential = std::move(potential);
      report->gradient = grad;
    }
    return next;
  }

 private:
  PhaseGrid grid_;
  SolverConfig config_;
  CollisionOperator collision_;
};

inline DistributionField vpfp_step(const DistributionField& f, const SolverConfig& config,
                                   const PhaseGrid& grid, StepReport* report = nullptr) {
  Scheme scheme(grid, config);
  return scheme.step(f, config.tau, report);
}

struct Snapshot {
  long step = 0;
  double time = 0.0;
  DistributionField f;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<StepReport> reports;
  DistributionField final_state;
};

/// Full steps of size tau, then one partial step if T is not a multiple of tau.
inline std::vector<double> step_schedule(double final_time, double tau) {
  std::vector<double> out;
  if (final_time <= 0.0) return out;
  const double ratio = final_time / tau;
  const double nearest = std::round(ratio);
  long full = static_cast<long>(std::floor(ratio));
  double rest = final_time - static_cast<double>(full) * tau;
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    full = static_cast<long>(nearest);
    rest = 0.0;
  }
  out.assign(static_cast<std::size_t>(full), tau);
  if (rest > 0.0) out.push_back(rest);
  return out;
}

using StepObserver = std::function<void(long step, const DistributionField& f, const StepReport&)>;

/**
 * Advances f0 to config.final_time. Snapshots are kept at step 0, every
 * snapshot_every steps, and at the final time. Failures are rethrown as
 * RunError carrying the step index.
 */
inline RunResult run(const PhaseGrid& grid, const SolverConfig& config, DistributionField f0,
                     const StepObserver& observer = {}) {
  Scheme scheme(grid, config);
  RunResult out;
  out.snapshots.push_back({0, 0.0, f0});
  const auto schedule = step_schedule(config.final_time, config.tau);
  DistributionField f = std::move(f0);
  double t = 0.0;
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const long k = static_cast<long>(n) + 1;
    StepReport rep;
    try {
      f = scheme.step(f, schedule[n], &rep);
    } catch (const std::exception& e) {
      throw RunError(k, e.what());
    }
    t = n + 1 == schedule.size() ? config.final_time : t + schedule[n];
    rep.time = t;
    if (observer) observer(k, f, rep);
    const bool last = n + 1 == schedule.size();
    if (last || (config.snapshot_every > 0 && k % config.snapshot_every == 0))
      out.snapshots.push_back({k, t, f});
    out.reports.push_back(std::move(rep));
  }
  out.final_state = std::move(f);
  return out;
}

}  // namespace vpfp
