// vpfp: runs the numerical studies of the high-field VPFP solver and writes CSV.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vpfp/config.hpp"
#include "vpfp/experiments.hpp"
#include "vpfp/io.hpp"
#include "vpfp/selftest.hpp"

namespace fs = std::filesystem;
using namespace vpfp;
namespace ex = vpfp::experiments;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 1;
  std::string algorithm;
};

/// Files are collected in memory and written only once the study finished.
struct Output {
  std::vector<std::pair<std::string, std::string>> files;

  void add(const std::string& name, const CsvTable& t) { files.emplace_back(name, t.str()); }
  void add_raw(const std::string& name, std::string text) { files.emplace_back(name, std::move(text)); }

  void flush(const fs::path& dir) const {
    fs::create_directories(dir);
    for (const auto& [name, text] : files) {
      std::ofstream os(dir / name, std::ios::binary);
      if (!os) throw Error("cannot write " + (dir / name).string());
      os << text;
      std::cout << (dir / name).string() << '\n';
    }
  }
};

Config load(const Options& o) {
  if (o.config_path.empty()) throw ConfigError("", "--config is required");
  return Config::from_file(o.config_path);
}

CollisionParams collision(Config& c, const Options& o) {
  CollisionParams p = read_collision(c);
  if (!o.algorithm.empty()) p.algorithm = parse_algorithm(o.algorithm);
  return p;
}

std::vector<Algorithm> algorithms(Config& c, const Options& o) {
  if (!o.algorithm.empty()) return {parse_algorithm(o.algorithm)};
  const std::string s = c.get_string("run.algorithm", "both");
  if (s == "both") return {Algorithm::fixed_step, Algorithm::line_search};
  return {parse_algorithm(s)};
}

ex::OptimizerStudy optimizer_study(Config& c) {
  ex::OptimizerStudy s;
  s.dim = c.get_int("optimizer.dim", s.dim);
  s.half_width_v = c.get_double("optimizer.half_width_v", s.half_width_v);
  s.nv = c.get_int("optimizer.nv", s.nv);
  s.tau = c.get_double("optimizer.tau", s.tau);
  s.tol = c.get_double("optimizer.tol", s.tol);
  s.theta = c.get_double("optimizer.theta", s.theta);
  s.max_iter = c.get_int("optimizer.max_iter", s.max_iter);
  s.reference_iterations = c.get_int("optimizer.reference_iterations", s.reference_iterations);
  return s;
}

void homog_convergence(const Options& o, Output& out) {
  Config c = load(o);
  const ex::OptimizerStudy base = optimizer_study(c);
  const auto algs = algorithms(c, o);
  const auto eps_list = c.get_list("sweep.epsilons", {1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
  const auto nvs = c.get_int_list("sweep.nvs", {64, 128, 256});
  const auto taus = c.get_list("sweep.taus", {0.05, 0.01, 0.005});
  const double sweep_eps = c.get_double("sweep.epsilon", 1e-2);
  const int steps = c.get_int("sweep.steps", 20);
  c.finish();

  CsvTable traces("homog_convergence", {"sweep", "algorithm", "epsilon", "nv", "tau", "gamma", "k", "error"});
  CsvTable summary("homog_convergence_summary",
                   {"sweep", "algorithm", "epsilon", "nv", "tau", "gamma", "iterations", "converged"});
  auto emit = [&](const std::string& sweep, const ex::OptimizerTrace& t) {
    for (std::size_t k = 0; k < t.errors.size(); ++k)
      traces.add(sweep, to_string(t.algorithm), t.epsilon, t.nv, t.tau, t.gamma, k, t.errors[k]);
    summary.add(sweep, to_string(t.algorithm), t.epsilon, t.nv, t.tau, t.gamma, t.iterations,
                t.converged ? 1 : 0);
  };
  for (Algorithm a : algs) {
    for (double eps : eps_list) emit("epsilon", ex::optimizer_trace(base, a, eps, ex::default_gamma(eps)));
    for (int nv : nvs) {
      ex::OptimizerStudy s = base;
      s.nv = nv;
      emit("dv", ex::optimizer_trace(s, a, sweep_eps, ex::default_gamma(sweep_eps)));
    }
    for (double tau : taus) {
      ex::OptimizerStudy s = base;
      s.tau = tau;
      emit("tau", ex::optimizer_trace(s, a, sweep_eps, ex::default_gamma(sweep_eps)));
    }
  }
  CsvTable per_step("iterations_per_step", {"algorithm", "epsilon", "step", "iterations"});
  for (Algorithm a : algs)
    for (double eps : eps_list) {
      const auto its = ex::iterations_per_step(base, a, eps, ex::default_gamma(eps), steps);
      for (std::size_t n = 0; n < its.size(); ++n) per_step.add(to_string(a), eps, n + 1, its[n]);
    }
  out.add("homog_convergence.csv", traces);
  out.add("homog_convergence_summary.csv", summary);
  out.add("iterations_per_step.csv", per_step);
}

void timing(const Options& o, Output& out) {
  Config c = load(o);
  const ex::OptimizerStudy base = optimizer_study(c);
  const auto algs = algorithms(c, o);
  const auto eps_list = c.get_list("timing.epsilons", {1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
  const auto nvs = c.get_int_list("timing.nvs", {64});
  const int repeats = c.get_int("timing.repeats", 5);
  c.finish();
  CsvTable t("timing", {"algorithm", "epsilon", "nv", "seconds_per_step"});
  for (Algorithm a : algs)
    for (int nv : nvs)
      for (double eps : eps_list) {
        ex::OptimizerStudy s = base;
        s.nv = nv;
        t.add(to_string(a), eps, nv, ex::outer_step_seconds(s, a, eps, ex::default_gamma(eps), repeats));
      }
  out.add("timing.csv", t);
}

void write_richardson(CsvTable& errors, CsvTable& slopes, const std::string& kind, double eps,
                      const RichardsonResult& r) {
  for (std::size_t k = 0; k < r.errors.size(); ++k) errors.add(kind, eps, r.parameters[k], r.errors[k]);
  slopes.add(kind, eps, r.slope);
}

void accuracy_v(const Options& o, Output& out) {
  Config c = load(o);
  ex::AccuracyVStudy s;
  s.half_width_v = c.get_double("accuracy_v.half_width_v", s.half_width_v);
  s.nvs = c.get_int_list("accuracy_v.nvs", s.nvs);
  s.tau = c.get_double("accuracy_v.tau", s.tau);
  s.final_time = c.get_double("accuracy_v.final_time", s.final_time);
  const auto eps_list = c.get_list("accuracy_v.epsilons", {1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
  s.collision = collision(c, o);
  c.finish();
  if (s.nvs.size() < 2) throw ConfigError("accuracy_v.nvs", "needs at least two velocity grids");
  CsvTable errors("accuracy_v", {"refined", "epsilon", "parameter", "error"});
  CsvTable slopes("accuracy_v_slope", {"refined", "epsilon", "slope"});
  for (double eps : eps_list) write_richardson(errors, slopes, "dv", eps, ex::accuracy_v(s, eps));
  out.add("accuracy_v.csv", errors);
  out.add("accuracy_v_slope.csv", slopes);
}

void accuracy_xt(const Options& o, Output& out) {
  Config c = load(o);
  ex::AccuracyXtStudy s;
  s.final_time = c.get_double("accuracy_xt.final_time", s.final_time);
  s.nx_time = c.get_int("accuracy_xt.nx_time", s.nx_time);
  s.half_width_v_time = c.get_double("accuracy_xt.half_width_v_time", s.half_width_v_time);
  s.nv_time = c.get_int("accuracy_xt.nv_time", s.nv_time);
  s.tau_divisors = c.get_int_list("accuracy_xt.tau_divisors", s.tau_divisors);
  s.nxs = c.get_int_list("accuracy_xt.nxs", s.nxs);
  s.half_width_v_space = c.get_double("accuracy_xt.half_width_v_space", s.half_width_v_space);
  s.nv_space = c.get_int("accuracy_xt.nv_space", s.nv_space);
  s.tau_divisor_space = c.get_int("accuracy_xt.tau_divisor_space", s.tau_divisor_space);
  const auto eps_list = c.get_list("accuracy_xt.epsilons", {1, 1e-2, 1e-5});
  s.collision = collision(c, o);
  s.workers = o.workers;
  c.finish();
  if (s.tau_divisors.size() < 2) throw ConfigError("accuracy_xt.tau_divisors", "needs at least two time steps");
  if (s.nxs.size() < 2) throw ConfigError("accuracy_xt.nxs", "needs at least two spatial grids");
  CsvTable errors("accuracy_xt", {"refined", "epsilon", "parameter", "error"});
  CsvTable slopes("accuracy_xt_slope", {"refined", "epsilon", "slope"});
  for (double eps : eps_list) {
    write_richardson(errors, slopes, "tau", eps, ex::accuracy_tau(s, eps));
    write_richardson(errors, slopes, "dx", eps, ex::accuracy_x(s, eps));
  }
  out.add("accuracy_xt.csv", errors);
  out.add("accuracy_xt_slope.csv", slopes);
}

void ap_distance(const Options& o, Output& out) {
  Config c = load(o);
  ex::ApStudy s = c.get_int("ap.dim", 1) == 2 ? ex::ApStudy::two_dimensional() : ex::ApStudy{};
  s.nx = c.get_int("ap.nx", s.nx);
  s.half_width_v = c.get_double("ap.half_width_v", s.half_width_v);
  s.nv = c.get_int("ap.nv", s.nv);
  s.tau = c.get_double("ap.tau", s.tau);
  s.final_time = c.get_double("ap.final_time", s.final_time);
  const auto eps_list = c.get_list("ap.epsilons", {1e-1, 1e-2, 1e-3});
  s.collision = collision(c, o);
  s.workers = o.workers;
  c.finish();
  CsvTable t("ap_distance", {"dim", "epsilon", "t", "distance"});
  for (double eps : eps_list) {
    const auto series = ex::ap_distance(s, eps);
    for (std::size_t k = 0; k < series.t.size(); ++k) t.add(s.dim, eps, series.t[k], series.value[k]);
  }
  out.add("ap_distance.csv", t);
}

void entropy_vfp(const Options& o, Output& out) {
  Config c = load(o);
  ex::EntropyVfpStudy s;
  s.nxs = c.get_int_list("entropy_vfp.nxs", s.nxs);
  s.half_width_v = c.get_double("entropy_vfp.half_width_v", s.half_width_v);
  s.nv = c.get_int("entropy_vfp.nv", s.nv);
  s.tau_divisor = c.get_double("entropy_vfp.tau_divisor", s.tau_divisor);
  s.final_time = c.get_double("entropy_vfp.final_time", s.final_time);
  s.collision = collision(c, o);
  s.workers = o.workers;
  c.finish();
  CsvTable t("entropy_vfp", {"nx", "t", "relative_entropy"});
  for (int nx : s.nxs) {
    const auto series = ex::entropy_vfp(s, nx);
    for (std::size_t k = 0; k < series.t.size(); ++k) t.add(nx, series.t[k], series.value[k]);
  }
  out.add("entropy_vfp.csv", t);
}

void entropy_vpfp(const Options& o, Output& out) {
  Config c = load(o);
  ex::EntropyVpfpStudy s;
  s.nx = c.get_int("entropy_vpfp.nx", s.nx);
  s.half_width_v = c.get_double("entropy_vpfp.half_width_v", s.half_width_v);
  s.nv = c.get_int("entropy_vpfp.nv", s.nv);
  s.tau_divisor = c.get_double("entropy_vpfp.tau_divisor", s.tau_divisor);
  s.equilibrium_time = c.get_double("entropy_vpfp.equilibrium_time", s.equilibrium_time);
  s.report_time = c.get_double("entropy_vpfp.report_time", s.report_time);
  s.collision = collision(c, o);
  s.workers = o.workers;
  c.finish();
  CsvTable t("entropy_vpfp", {"t", "relative_entropy"});
  const auto series = ex::entropy_vpfp(s);
  for (std::size_t k = 0; k < series.t.size(); ++k) t.add(series.t[k], series.value[k]);
  out.add("entropy_vpfp.csv", t);
}

void mixing(const Options& o, Output& out) {
  Config c = load(o);
  ex::MixingStudy s;
  s.nx = c.get_int("mixing.nx", s.nx);
  s.nx_reference = c.get_int("mixing.nx_reference", s.nx_reference);
  s.half_width_v = c.get_double("mixing.half_width_v", s.half_width_v);
  s.nv = c.get_int("mixing.nv", s.nv);
  s.tau_divisor = c.get_double("mixing.tau_divisor", s.tau_divisor);
  s.tau_reference = c.get_double("mixing.tau_reference", s.tau_reference);
  s.eps0 = c.get_double("mixing.eps0", s.eps0);
  s.times = c.get_list("mixing.times", s.times);
  s.collision = collision(c, o);
  s.workers = o.workers;
  c.finish();
  CsvTable profile("mixing", {"t", "x", "rho_scheme", "rho_reference"});
  CsvTable summary("mixing_summary", {"t", "max_abs_discrepancy"});
  for (const auto& p : ex::mixing(s, [](const std::string& m) { std::cerr << m << '\n'; })) {
    for (std::size_t i = 0; i < p.x.size(); ++i) profile.add(p.time, p.x[i], p.rho_scheme[i], p.rho_reference[i]);
    summary.add(p.time, p.max_discrepancy);
  }
  out.add("mixing.csv", profile);
  out.add("mixing_summary.csv", summary);
}

void evolve(const Options& o, Output& out, int dim) {
  Config c = load(o);
  const std::string sec = dim == 2 ? "evolve_2d." : "evolve_3d.";
  ex::EvolveStudy s = dim == 2 ? ex::EvolveStudy{} : ex::EvolveStudy::three_dimensional();
  s.half_width_v = c.get_double(sec + "half_width_v", s.half_width_v);
  s.nv = c.get_int(sec + "nv", s.nv);
  s.tau = c.get_double(sec + "tau", s.tau);
  s.epsilon = c.get_double(sec + "epsilon", s.epsilon);
  s.final_time = c.get_double(sec + "final_time", s.final_time);
  s.snapshot_every = c.get_int(sec + "snapshot_every", s.snapshot_every);
  s.collision = collision(c, o);
  c.finish();
  const auto r = ex::evolve(s);
  const std::string tag = dim == 2 ? "evolve_2d" : "evolve_3d";
  CsvTable t(tag, {"step", "t", "mass", "min_f", "relative_entropy", "iterations"});
  for (const auto& rec : r.records) t.add(rec.step, rec.time, rec.mass, rec.min_f, rec.entropy, rec.iterations);
  out.add(tag + ".csv", t);
  for (const auto& snap : r.snapshots) {
    std::ostringstream os;
    write_snapshot(os, snap.f, snap.time);
    char name[64];
    std::snprintf(name, sizeof name, "%s_snapshot_%05ld.csv", tag.c_str(), snap.step);
    out.add_raw(name, os.str());
  }
}

int run_selftest(Output& out) {
  CsvTable t("selftest", {"check", "value", "tolerance", "pass"});
  int failures = 0;
  for (const auto& chk : vpfp::selftest::property_suite()) {
    std::cout << (chk.pass ? "PASS  " : "FAIL  ") << chk.name << ": " << format_double(chk.value)
              << " (tolerance " << format_double(chk.tolerance) << ")\n";
    t.add(chk.name, chk.value, chk.tolerance, chk.pass ? 1 : 0);
    failures += chk.pass ? 0 : 1;
  }
  out.add("selftest.csv", t);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic-preserving VPFP solver: numerical studies"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out_dir, "Output directory for CSV files");
  app.add_option("--workers", o.workers, "Threads for the per-node collision map")->check(CLI::PositiveNumber);
  app.add_option("--algorithm", o.algorithm, "Inner optimizer")->check(CLI::IsMember({"fixed", "linesearch"}));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"homog-convergence", "optimizer error traces for eps, dv and tau sweeps"},
      {"timing", "wall-clock per outer step across eps"},
      {"accuracy-v", "Richardson errors under dv refinement"},
      {"accuracy-xt", "Richardson errors under tau and dx refinement"},
      {"ap-distance", "L1 distance to the local Maxwellian over time"},
      {"entropy-vfp", "relative entropy decay with a fixed potential"},
      {"entropy-vpfp", "relative entropy decay of the coupled system"},
      {"mixing", "spatially varying eps against the explicit solver"},
      {"evolve-2d", "homogeneous 2D relaxation with snapshots"},
      {"evolve-3d", "homogeneous 3D relaxation with snapshots"},
      {"selftest", "property checks"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  Output out;
  try {
    int status = 0;
    if (cmd == "homog-convergence") homog_convergence(o, out);
    else if (cmd == "timing") timing(o, out);
    else if (cmd == "accuracy-v") accuracy_v(o, out);
    else if (cmd == "accuracy-xt") accuracy_xt(o, out);
    else if (cmd == "ap-distance") ap_distance(o, out);
    else if (cmd == "entropy-vfp") entropy_vfp(o, out);
    else if (cmd == "entropy-vpfp") entropy_vpfp(o, out);
    else if (cmd == "mixing") mixing(o, out);
    else if (cmd == "evolve-2d") evolve(o, out, 2);
    else if (cmd == "evolve-3d") evolve(o, out, 3);
    else status = run_selftest(out);
    out.flush(o.out_dir);
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
