#include <gtest/gtest.h>

#include <cmath>

#include "vpfp/collision/jko.hpp"
#include "vpfp/diagnostics.hpp"
#include "vpfp/initial_conditions.hpp"

using namespace vpfp;

namespace {

struct Homogeneous {
  PhaseGrid grid = PhaseGrid::homogeneous(5.0, 64, 1);
  DistributionField f0 = ic::double_bump(grid);
  std::vector<double> M = local_maxwellian(density(f0)[0], std::vector<double>{0.0}, grid);
};

double gamma_for(double eps) { return eps > 5e-3 ? 0.5 : 0.4; }

}  // namespace

TEST(Jko, BothAlgorithmsConvergeUniformlyInEpsilon) {
  Homogeneous h;
  for (double eps : {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto a = jko_step_fixed(h.f0.node(0), h.M, eps, 0.05, gamma_for(eps), 1e-7, 1000, h.grid);
    const auto b = jko_step_linesearch(h.f0.node(0), h.M, eps, 0.05, 0.01, 1e-7, 1000, h.grid);
    EXPECT_TRUE(a.converged);
    EXPECT_TRUE(b.converged);
    EXPECT_LE(a.iterations, 160);
    EXPECT_LE(b.iterations, 160);
    EXPECT_LE((a.f() - b.f()).lpNorm<1>() / b.f().lpNorm<1>(), 1e-5) << "eps = " << eps;
  }
}

TEST(Jko, ConservesMassAndKeepsIteratesPositive) {
  Homogeneous h;
  for (Algorithm alg : {Algorithm::fixed_step, Algorithm::line_search}) {
    CollisionParams p;
    p.algorithm = alg;
    JkoSolver solver(build_divergence_operator(1, 64, h.grid.dv()));
    const auto r = solver.solve(h.f0.node(0), h.M, 1e-3, 0.05, p, {true, true, false});
    double m0 = 0.0;
    for (double x : h.f0.node(0)) m0 += x;
    for (const auto& u : r.iterates) {
      EXPECT_GT(u.head(64).minCoeff(), 0.0);
      EXPECT_NEAR(u.head(64).sum() / m0, 1.0, 1e-12);
    }
    for (const auto& e : r.trace) EXPECT_LE(e.residual, 1e-10);
  }
}

TEST(Jko, LineSearchObjectiveIsMonotone) {
  Homogeneous h;
  CollisionParams p;
  JkoSolver solver(build_divergence_operator(1, 64, h.grid.dv()));
  const auto r = solver.solve(h.f0.node(0), h.M, 1e-2, 0.05, p, {true, false, false});
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    EXPECT_LE(r.trace[k].objective, r.trace[k - 1].objective + 1e-12 * std::abs(r.trace[k - 1].objective));
}

TEST(Jko, RelativeEntropyDecreasesPerStep) {
  // The minimiser satisfies eps W2^2 + 2 tau E(f|M) <= 2 tau E(f*|M).
  for (int dim = 1; dim <= 2; ++dim) {
    const PhaseGrid g = PhaseGrid::homogeneous(5.0, dim == 1 ? 64 : 20, dim);
    const DistributionField f0 = dim == 1 ? ic::double_bump(g) : ic::four_bump_2d(g);
    const auto shift = std::vector<double>(static_cast<std::size_t>(dim), 0.4);
    const auto M = local_maxwellian(density(f0)[0], shift, g);
    for (double eps : {1.0, 1e-2, 1e-5}) {
      const auto r = jko_step_linesearch(f0.node(0), M, eps, 0.05, 0.01, 1e-7, 1000, g);
      const Eigen::VectorXd f = r.f();
      const double before = relative_entropy(f0.node(0), M, g.velocity_cell());
      const double after = relative_entropy(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())), M,
                                            g.velocity_cell());
      EXPECT_LE(after, before + 1e-10) << "d = " << dim << ", eps = " << eps;
    }
  }
}

TEST(Jko, SmallEpsilonRelaxesToMaxwellian) {
  Homogeneous h;
  const auto r = jko_step_linesearch(h.f0.node(0), h.M, 1e-8, 0.05, 0.01, 1e-7, 1000, h.grid);
  double d = 0.0;
  for (std::size_t j = 0; j < h.M.size(); ++j) d += std::abs(r.f()[static_cast<Eigen::Index>(j)] - h.M[j]);
  EXPECT_LE(d * h.grid.dv(), 1e-4);
}

TEST(Jko, MaxwellianIsFixedPoint) {
  Homogeneous h;
  const auto r = jko_step_linesearch(h.M, h.M, 1e-3, 0.05, 0.01, 1e-7, 1000, h.grid);
  double d = 0.0;
  for (std::size_t j = 0; j < h.M.size(); ++j) d += std::abs(r.f()[static_cast<Eigen::Index>(j)] - h.M[j]);
  EXPECT_LE(d * h.grid.dv(), 1e-12);
}

TEST(Jko, ThreeDimensionalStepConverges) {
  const PhaseGrid g = PhaseGrid::homogeneous(4.0, 8, 3);
  const DistributionField f0 = ic::double_gaussian_3d(g);
  const auto M = local_maxwellian(density(f0)[0], std::vector<double>(3, 0.0), g);
  const auto r = jko_step_linesearch(f0.node(0), M, 0.2, 0.05, 0.01, 1e-7, 1000, g);
  EXPECT_TRUE(r.converged);
  EXPECT_GT(r.f().minCoeff(), 0.0);
}

TEST(Jko, LiftToFloorPreservesMass) {
  const std::vector<double> f{0.0, -1e-15, 2.0, 1.0};
  const Eigen::VectorXd b = lift_to_floor(f, 1e-10);
  EXPECT_NEAR(b.sum(), 3.0 - 1e-15, 1e-14);
  EXPECT_GT(b.minCoeff(), 0.0);
  EXPECT_THROW(lift_to_floor(std::vector<double>{0.0, 0.0}, 1e-10), Error);
}

TEST(Jko, RejectsBadArguments) {
  Homogeneous h;
  EXPECT_THROW(jko_step_linesearch(h.f0.node(0), h.M, 0.0, 0.05, 0.01, 1e-7, 10, h.grid), Error);
  EXPECT_THROW(jko_step_linesearch(h.f0.node(0), h.M, 1.0, 0.05, 0.7, 1e-7, 10, h.grid), Error);
  EXPECT_THROW(jko_step_fixed(h.f0.node(0), h.M, 1.0, -0.05, 0.5, 1e-7, 10, h.grid), Error);
}

TEST(OptimizerTrace, ErrorsAgainstReference) {
  Homogeneous h;
  CollisionParams ref;
  ref.algorithm = Algorithm::fixed_step;
  ref.max_iter = 160;
  JkoSolver solver(build_divergence_operator(1, 64, h.grid.dv()));
  const Eigen::VectorXd u_star = solver.solve(h.f0.node(0), h.M, 1e-2, 0.05, ref, {false, false, true}).u;
  CollisionParams p;
  const auto r = solver.solve(h.f0.node(0), h.M, 1e-2, 0.05, p, {false, true, false});
  const auto e = optimizer_error_trace(r.iterates, u_star);
  ASSERT_GE(e.size(), 3u);
  EXPECT_LT(e.back(), 1e-6);
  // superlinear finish: the last ratio beats the first one clearly
  const double first = e[1] / e[0];
  const double last = e[e.size() - 1] / e[e.size() - 2];
  EXPECT_LT(last, first);

  std::vector<Eigen::VectorXd> same(3, u_star);
  for (double x : optimizer_error_trace(same, u_star)) EXPECT_EQ(x, 0.0);
  std::vector<Eigen::VectorXd> scaled;
  for (const auto& u : r.iterates) scaled.push_back(2.5 * u);
  const auto es = optimizer_error_trace(scaled, 2.5 * u_star);
  for (std::size_t k = 0; k < e.size(); ++k) EXPECT_NEAR(es[k], e[k], 1e-12 * std::max(1.0, e[k]));
  EXPECT_THROW(optimizer_error_trace(same, Eigen::VectorXd::Zero(u_star.size())), Error);
}
