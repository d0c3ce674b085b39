#include <gtest/gtest.h>

#include "vpfp/diagnostics.hpp"
#include "vpfp/experiments.hpp"
#include "vpfp/scheme.hpp"

using namespace vpfp;

namespace {

SolverConfig two_stream_config(const PhaseGrid& g, const InitialState& s, double eps, double T, int workers = 1) {
  SolverConfig c = experiments::make_config(g, Mode::full, eps, g.dx() / 8, T, {}, workers);
  c.background = s.background;
  return c;
}

}  // namespace

TEST(StepSchedule, Cases) {
  EXPECT_TRUE(step_schedule(0.0, 0.1).empty());
  const auto three = step_schedule(0.3, 0.1);
  ASSERT_EQ(three.size(), 3u);
  for (double t : three) EXPECT_EQ(t, 0.1);
  const auto partial = step_schedule(0.25, 0.1);
  ASSERT_EQ(partial.size(), 3u);
  EXPECT_NEAR(partial.back(), 0.05, 1e-15);
}

TEST(Scheme, HomogeneousMaxwellianIsStationary) {
  const PhaseGrid g = PhaseGrid::homogeneous(6.0, 48, 1);
  const DistributionField M = local_equilibrium(ic::maxwellian(g, 1.7), std::vector<double>{0.0});
  const SolverConfig c = experiments::make_config(g, Mode::homogeneous, 1e-2, 0.05, 0.5, {}, 1);
  const RunResult r = run(g, c, M);
  EXPECT_LE(l1_distance_to_equilibrium(r.final_state, M), 1e-12);
}

TEST(Scheme, ConservesMassOverManySteps) {
  const PhaseGrid g = experiments::unit_interval_grid(16, 6.0, 32);
  const InitialState s = ic::two_stream(g);
  SolverConfig c = two_stream_config(g, s, 1e-2, 0.0);
  c.final_time = 100 * c.tau;
  const double m0 = s.f.mass();
  double worst = 0.0;
  run(g, c, s.f, [&](long, const DistributionField& f, const StepReport& rep) {
    worst = std::max(worst, std::abs(f.mass() - m0) / m0);
    EXPECT_GT(rep.min_f, 0.0);
    EXPECT_EQ(rep.not_converged, 0);
  });
  EXPECT_LE(worst, 1e-9);
}

TEST(Scheme, ZeroFinalTimeReturnsInitialData) {
  const PhaseGrid g = experiments::unit_interval_grid(8, 6.0, 16);
  const InitialState s = ic::two_stream(g);
  const RunResult r = run(g, two_stream_config(g, s, 1.0, 0.0), s.f);
  EXPECT_EQ(r.final_state.values(), s.f.values());
  EXPECT_EQ(r.snapshots.size(), 1u);
  EXPECT_TRUE(r.reports.empty());
}

TEST(Scheme, ThreeStepsMatchManualStepping) {
  const PhaseGrid g = experiments::unit_interval_grid(8, 6.0, 16);
  const InitialState s = ic::two_stream(g);
  SolverConfig c = two_stream_config(g, s, 0.1, 0.0);
  c.final_time = 3 * c.tau;
  c.snapshot_every = 1;
  const RunResult r = run(g, c, s.f);
  ASSERT_EQ(r.reports.size(), 3u);
  ASSERT_EQ(r.snapshots.size(), 4u);
  EXPECT_NEAR(r.reports.back().time, c.final_time, 1e-15);
  Scheme scheme(g, c);
  DistributionField f = s.f;
  for (int k = 0; k < 3; ++k) f = scheme.step(f, c.tau);
  EXPECT_EQ(f.values(), r.final_state.values());
}

TEST(Scheme, DeterministicAndWorkerIndependent) {
  const PhaseGrid g = experiments::unit_interval_grid(16, 6.0, 32);
  const InitialState s = ic::two_stream(g);
  SolverConfig c1 = two_stream_config(g, s, 1e-3, 0.0, 1);
  c1.final_time = 5 * c1.tau;
  SolverConfig c3 = c1;
  c3.workers = 3;
  const auto a = run(g, c1, s.f).final_state;
  const auto b = run(g, c1, s.f).final_state;
  const auto c = run(g, c3, s.f).final_state;
  EXPECT_EQ(a.values(), b.values());
  EXPECT_EQ(a.values(), c.values());
}

TEST(Scheme, PositivityAcrossEpsilon) {
  const PhaseGrid g = experiments::unit_interval_grid(16, 6.0, 32);
  const InitialState s = ic::two_stream(g);
  for (double eps : {1.0, 1e-3, 1e-6}) {
    SolverConfig c = two_stream_config(g, s, eps, 0.0);
    c.final_time = 10 * c.tau;
    EXPECT_GT(run(g, c, s.f).final_state.min(), 0.0) << "eps = " << eps;
  }
}

TEST(Scheme, VfpModeUsesExternalField) {
  const PhaseGrid g = experiments::unit_interval_grid(16, 6.0, 32);
  const InitialState s = ic::vfp(g);
  SolverConfig c = experiments::make_config(g, Mode::vfp, 1.0, g.dx() / 15, 0.0, {}, 1);
  c.external_field = s.external_field;
  const Scheme scheme(g, c);
  EXPECT_EQ(scheme.field(s.f), s.external_field);
}

TEST(Scheme, RejectsInvalidInput) {
  const PhaseGrid g = experiments::unit_interval_grid(8, 6.0, 16);
  InitialState s = ic::two_stream(g);
  SolverConfig c = two_stream_config(g, s, 1.0, 0.0);
  Scheme scheme(g, c);
  DistributionField bad = s.f;
  bad(2, 3) = -1.0;
  EXPECT_THROW(scheme.step(bad, c.tau), PositivityViolation);
  bad(2, 3) = std::nan("");
  EXPECT_THROW(scheme.step(bad, c.tau), Error);
  SolverConfig missing = c;
  missing.background.clear();
  EXPECT_THROW(Scheme(g, missing), Error);
  SolverConfig cfl = c;
  cfl.tau = g.dx();
  cfl.final_time = g.dx();
  EXPECT_THROW(run(g, cfl, s.f), RunError);
}
