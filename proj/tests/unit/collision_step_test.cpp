#include <gtest/gtest.h>

#include "vpfp/collision/collision_step.hpp"
#include "vpfp/diagnostics.hpp"
#include "vpfp/initial_conditions.hpp"
#include "vpfp/poisson.hpp"

using namespace vpfp;

namespace {

struct Fixture {
  PhaseGrid grid = PhaseGrid::make(0.5, 0.5, 12, 6.0, 32, 1);
  InitialState init = ic::two_stream(grid);
  std::vector<double> rho = density(init.f);
  std::vector<double> grad = solve_poisson(rho, init.background, grid).gradient;
};

}  // namespace

TEST(CollisionStep, ConservesMassPerNode) {
  Fixture fx;
  CollisionOperator op(fx.grid, {}, 1);
  CollisionStats stats;
  const auto eps = constant_epsilon(fx.grid, 1e-2);
  const DistributionField out = op.apply(fx.init.f, fx.rho, fx.grad, eps, 0.01, &stats);
  const auto rho = density(out);
  for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(rho[i] / fx.rho[i], 1.0, 1e-12);
  EXPECT_GT(out.min(), 0.0);
  EXPECT_EQ(stats.iterations.size(), 12u);
  EXPECT_EQ(stats.not_converged, 0);
}

TEST(CollisionStep, DeterministicAcrossWorkerCounts) {
  Fixture fx;
  const auto eps = constant_epsilon(fx.grid, 1e-1);
  CollisionOperator one(fx.grid, {}, 1), four(fx.grid, {}, 4);
  const DistributionField a = one.apply(fx.init.f, fx.rho, fx.grad, eps, 0.01);
  const DistributionField b = four.apply(fx.init.f, fx.rho, fx.grad, eps, 0.01);
  EXPECT_EQ(a.values(), b.values());
}

TEST(CollisionStep, EntropyDecreasesAtEveryNode) {
  Fixture fx;
  const auto eps = constant_epsilon(fx.grid, 0.3);
  CollisionOperator op(fx.grid, {}, 2);
  const DistributionField out = op.apply(fx.init.f, fx.rho, fx.grad, eps, 0.02);
  for (std::size_t i = 0; i < out.nx(); ++i) {
    const auto M = local_maxwellian(fx.rho[i], field_shift(fx.grad[i], 1), fx.grid);
    const double before = relative_entropy(fx.init.f.node(i), M, fx.grid.dv());
    const double after = relative_entropy(out.node(i), M, fx.grid.dv());
    EXPECT_LE(after, before + 1e-10) << "node " << i;
  }
}

TEST(CollisionStep, PerNodeEpsilonField) {
  Fixture fx;
  std::vector<double> eps(12, 1.0);
  eps[5] = 1e-8;
  CollisionOperator op(fx.grid, {}, 1);
  const DistributionField out = op.apply(fx.init.f, fx.rho, fx.grad, eps, 0.05);
  const auto M = local_maxwellian(fx.rho[5], field_shift(fx.grad[5], 1), fx.grid);
  double d5 = 0.0, d4 = 0.0;
  const auto M4 = local_maxwellian(fx.rho[4], field_shift(fx.grad[4], 1), fx.grid);
  for (std::size_t j = 0; j < M.size(); ++j) {
    d5 += std::abs(out(5, j) - M[j]) * fx.grid.dv();
    d4 += std::abs(out(4, j) - M4[j]) * fx.grid.dv();
  }
  EXPECT_LT(d5, 1e-4);
  EXPECT_GT(d4, 1e-2);
}

TEST(CollisionStep, ReportsFailingNode) {
  Fixture fx;
  DistributionField bad = fx.init.f;
  for (double& x : bad.node(7)) x = 0.0;
  auto rho = fx.rho;
  rho[7] = 0.0;
  CollisionOperator op(fx.grid, {}, 2);
  try {
    op.apply(bad, rho, fx.grad, constant_epsilon(fx.grid, 1.0), 0.01);
    FAIL() << "expected CollisionError";
  } catch (const CollisionError& e) {
    EXPECT_EQ(e.node(), 7u);
  }
}

TEST(CollisionStep, RejectsShapeMismatch) {
  Fixture fx;
  CollisionOperator op(fx.grid, {}, 1);
  std::vector<double> short_eps(3, 1.0);
  EXPECT_THROW(op.apply(fx.init.f, fx.rho, fx.grad, short_eps, 0.01), Error);
}
