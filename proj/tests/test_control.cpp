#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "qlcontrol/instances.hpp"

using namespace qlc;

namespace {

ScalarField random_control(const Mesh &m, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  ScalarField u = ScalarField::zeros(m);
  for (double &v : u.values) v = d(rng);
  return u;
}

oracle::QuadraticControl1D quadratic_oracle_problem(const Instance &inst) {
  oracle::QuadraticControl1D q;
  q.cells = inst.spec.cells;
  q.f.assign(q.cells + 1, inst.spec.source_value);
  q.target = inst.problem.target.values;
  q.M = inst.spec.tychonov;
  return q;
}

}  // namespace

TEST(ControlProblem, RejectsNonPositiveTychonov) {
  InstanceSpec s = builtin_spec("quadratic-1d");
  s.tychonov = 0.0;
  EXPECT_THROW(build_instance(s), std::invalid_argument);
}

TEST(ControlProblem, RegularizerValues) {
  const Instance inst = build_instance(builtin_spec("quadratic-1d"));
  const ControlProblem &cp = inst.problem;
  const ScalarField x = ScalarField::from_function(cp.mesh, [](Vec2 p) { return p.x; });
  EXPECT_NEAR(regularizer_term(cp, x), 0.5 * cp.tychonov, 1e-14);
  EXPECT_NEAR(regularizer_term(cp, ScalarField::constant(cp.mesh, 3.0)), 0.0, 1e-14);
  InstanceSpec s = builtin_spec("quadratic-1d");
  s.regularizer = "l2";
  const Instance l2 = build_instance(s);
  EXPECT_NEAR(regularizer_term(l2.problem, ScalarField::constant(l2.problem.mesh, 2.0)),
              0.5 * s.tychonov * 4.0, 1e-14);
}

TEST(ControlProblem, QuadraticCostMatchesOracle) {
  const Instance inst = build_instance(builtin_spec("quadratic-1d"));
  const auto q = quadratic_oracle_problem(inst);
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const ScalarField u = random_control(inst.problem.mesh, s);
    EXPECT_NEAR(evaluate_cost(inst.problem, u), oracle::quadratic_cost(q, u.values), 1e-12);
  }
}

TEST(ControlOptimizer, ReachesQuadraticProgramOptimum) {
  const Instance inst = build_instance(builtin_spec("quadratic-1d"));
  const auto ref = oracle::quadratic_program_oracle(quadratic_oracle_problem(inst));
  const auto [u, rep] = optimize_control(inst.problem, ScalarField::zeros(inst.problem.mesh));
  const double J = evaluate_cost(inst.problem, u);
  EXPECT_GE(J, ref.cost - 1e-12);
  EXPECT_LE(J, ref.cost + 1e-6 * (1.0 + std::abs(ref.cost)));
  ScalarField uref = ScalarField::zeros(inst.problem.mesh);
  uref.values = ref.u;
  const ScalarField y = solve_state_for(inst.problem, uref);
  for (std::size_t k = 0; k < y.size(); ++k) EXPECT_NEAR(y[k], ref.y[k], 1e-10);
}

TEST(ControlOptimizer, TraceIsNonIncreasing) {
  const Instance inst = build_instance(builtin_spec("linear-tracking-1d"));
  const auto [u, rep] = optimize_control(inst.problem, ScalarField::zeros(inst.problem.mesh));
  for (std::size_t k = 1; k < rep.trace.size(); ++k) EXPECT_LE(rep.trace[k], rep.trace[k - 1]);
  EXPECT_NEAR(rep.cost, evaluate_cost(inst.problem, u), 1e-12);
}

TEST(ControlOptimizer, ForwardAndCentralGradientsAgree) {
  const Instance inst = build_instance(builtin_spec("sin-gradient-1d"));
  const ScalarField u = random_control(inst.problem.mesh, 3, 0.5);
  const auto gf = cost_gradient(inst.problem, u, Difference::Forward);
  const auto gc = cost_gradient(inst.problem, u, Difference::Central);
  ASSERT_EQ(gf.size(), u.size());
  double scale = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < gf.size(); ++k) {
    scale = std::max(scale, std::abs(gc[k]));
    diff = std::max(diff, std::abs(gf[k] - gc[k]));
  }
  EXPECT_LT(diff, 1e-3 * (scale + 1e-6));
}

TEST(ControlOptimizer, ClampedQuarticStartsAgree) {
  const Instance inst = build_instance(builtin_spec("clamped-quartic-1d"));
  std::vector<double> costs;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto [u, rep] = optimize_control(inst.problem, random_control(inst.problem.mesh, s));
    costs.push_back(evaluate_cost(inst.problem, u));
  }
  const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
  EXPECT_LE(*hi - *lo, 1e-3);
}

TEST(ControlOptimizer, BeatsTinyLattice) {
  const Instance inst = build_instance(builtin_spec("tiny-tracking-1d"));
  const ControlProblem &cp = inst.problem;
  ASSERT_EQ(cp.mesh.node_count(), 7u);
  const auto lattice = oracle::enumerate_controls_oracle(
      [&](const std::vector<double> &v) {
        ScalarField u = ScalarField::zeros(cp.mesh);
        u.values = v;
        return evaluate_cost(cp, u);
      },
      {-1.0, 0.0, 1.0}, 7);
  EXPECT_EQ(lattice.evaluated, 2187u);
  ScalarField start = ScalarField::zeros(cp.mesh);
  start.values = lattice.argmin;
  const auto [u, rep] = optimize_control(cp, start);
  EXPECT_LE(evaluate_cost(cp, u), lattice.best + 1e-12);
}

TEST(ControlOptimizer, LatticeOracleRejectsLargeSpaces) {
  auto zero = [](const std::vector<double> &) { return 0.0; };
  EXPECT_THROW(oracle::enumerate_controls_oracle(zero, {-1.0, 0.0, 1.0}, 8), std::length_error);
  EXPECT_THROW(oracle::enumerate_controls_oracle(zero, {-1.0, -0.5, 0.0, 0.5, 1.0}, 6),
               std::length_error);
}

TEST(ControlOptimizer, MonotoneRegimeDescends) {
  const Instance inst = build_instance(builtin_spec("perturbed-linear-1d"));
  const ScalarField u0 = ScalarField::zeros(inst.problem.mesh);
  const auto [u, rep] = optimize_control(inst.problem, u0);
  EXPECT_LT(evaluate_cost(inst.problem, u), evaluate_cost(inst.problem, u0));
}

TEST(ControlOptimizer, MinimizeFdOnSmoothFunction) {
  const Mesh m = build_mesh(1, 4);
  const CostFunction f = [](const ScalarField &u, const std::optional<ScalarField> &) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - 0.1 * k) * (u[k] - 0.1 * k);
    return CostSample{s, u};
  };
  // Forward differences bias the gradient by about the step, so the
  // iteration ends on the stall test near the minimizer.
  const auto [u, rep] = minimize_fd(f, ScalarField::zeros(m));
  EXPECT_LT(rep.cost, 1e-9);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(u[k], 0.1 * k, 1e-5);
}
