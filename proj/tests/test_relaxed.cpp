#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "qlcontrol/instances.hpp"

using namespace qlc;

namespace {

ScalarField random_control(const Mesh &m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField u = ScalarField::zeros(m);
  for (double &v : u.values) v = d(rng);
  return u;
}

double trapz_negative_capped(const std::vector<double> &y, double cap) {
  const int n = static_cast<int>(y.size()) - 1;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += ((i == 0 || i == n) ? 0.5 : 1.0) / n * -std::min(y[i], cap);
  return s;
}

}  // namespace

TEST(Relaxed, RequiresQuasilinearBase) {
  const Instance mono = build_instance(builtin_spec("perturbed-linear-1d"));
  EXPECT_FALSE(mono.relaxable());
  EXPECT_THROW(mono.relaxed(), std::invalid_argument);
  EXPECT_TRUE(build_instance(builtin_spec("tiny-tracking-1d")).relaxable());
}

TEST(Relaxed, GaugeRoundTrip) {
  for (int d : {1, 2}) {
    const Mesh m = build_mesh(d, d == 1 ? 8 : 4);
    const ScalarField u = random_control(m, 4);
    const ScalarField back = recover_control(dirac_field(gradient(u)), gauge_of(u));
    for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(back[k], u[k], 1e-10);
  }
}

TEST(Relaxed, DiracEmbeddingReproducesClassicalCost) {
  for (const char *name : {"tiny-tracking-1d", "sin-gradient-1d", "sin-gradient-2d"}) {
    const Instance inst = build_instance(builtin_spec(name));
    const RelaxedProblem rp = inst.relaxed();
    const ScalarField u = random_control(inst.problem.mesh, 2);
    const RelaxedPoint pt = dirac_embedding(rp, u);
    EXPECT_NEAR(pt.cost, evaluate_cost(inst.problem, u), 1e-10) << name;
    EXPECT_NEAR(evaluate_relaxed_cost(rp, pt.mu, pt.gauge, pt.nu), pt.cost, 1e-10) << name;
    EXPECT_EQ(classify(pt.nu), MeasureClass::PH10);
  }
}

TEST(Relaxed, InfeasibleStateMeasureIsRejected) {
  const Instance inst = build_instance(builtin_spec("tiny-tracking-1d"));
  const RelaxedProblem rp = inst.relaxed();
  const Mesh &m = inst.problem.mesh;
  YoungMeasureField nu(m, 2);
  for (std::size_t c = 0; c < nu.cell_count(); ++c) nu.atom(c, 0) = {1.0, 0.0};
  EXPECT_THROW(solve_mv_state(rp, ScalarField::zeros(m), nu), InfeasibleMeasure);
}

TEST(Relaxed, RestorationReachesFeasibility) {
  const Instance inst = build_instance(builtin_spec("sin-gradient-1d"));
  const RelaxedProblem rp = inst.relaxed();
  const Mesh &m = inst.problem.mesh;
  YoungMeasureField nu(m, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (std::size_t c = 0; c < nu.cell_count(); ++c) {
    nu.atom(c, 0) = {d(rng), 0.0};
    nu.atom(c, 1) = {d(rng), 0.0};
    nu.weight(c, 0) = 0.5;
    nu.weight(c, 1) = 0.5;
  }
  const Restored r = restore_feasibility(rp, ScalarField::constant(m, 1.0), nu);
  EXPECT_LT(r.consistency, 1e-10);
  EXPECT_EQ(classify(r.nu), MeasureClass::PH10);
  EXPECT_LT(r.nu.normalization_error(), 1e-14);
  // Restored state solves the relaxed equation.
  const MvState s = solve_mv_state(rp, ScalarField::constant(m, 1.0), r.nu);
  EXPECT_LT((s.y - r.y).max_abs(), 1e-10);
}

TEST(Relaxed, DesignedGapMatchesOracle) {
  const Instance inst = build_instance(builtin_spec("gap-family-1d"));
  ASSERT_TRUE(inst.designed_gap.has_value());
  const int n = inst.spec.cells;
  const double omega = 4.0 * std::numbers::pi;
  // Classical state of u = 1 and the relaxed state with abar = 0.
  oracle::StateSystem1D cl;
  cl.cells = n;
  cl.b = 1.0;
  cl.lower = [omega](double p) { return 0.1 * (1.0 - std::cos(omega * p)); };
  cl.f.assign(n + 1, 1.0);
  oracle::StateSystem1D rel = cl;
  rel.lower = [](double) { return 0.0; };
  const auto yc = oracle::newton_state_oracle(cl);
  const auto yr = oracle::newton_state_oracle(rel);
  ASSERT_TRUE(yc.pass && yr.pass);
  const double ref = trapz_negative_capped(yc.values, 1.0) - trapz_negative_capped(yr.values, 1.0);
  EXPECT_NEAR(*inst.designed_gap, ref, 1e-9);
  EXPECT_GT(ref, 0.008);
}

TEST(Relaxed, OptimizerNeverIncreasesCost) {
  const Instance inst = build_instance(builtin_spec("tiny-tracking-1d"));
  const RelaxedProblem rp = inst.relaxed();
  const RelaxedPoint init = dirac_embedding(rp, ScalarField::zeros(inst.problem.mesh));
  const auto [pt, rep] = optimize_relaxed(rp, init);
  EXPECT_LE(pt.cost, init.cost + 1e-12);
  for (std::size_t k = 1; k < rep.trace.size(); ++k) EXPECT_LE(rep.trace[k], rep.trace[k - 1] + 1e-12);
  EXPECT_LT(pt.nu.normalization_error(), 1e-12);
  EXPECT_LT(rep.consistency, kFeasibilityTolerance);
}

TEST(Relaxed, RelaxedBelowTinyLattice) {
  const Instance inst = build_instance(builtin_spec("tiny-tracking-1d"));
  const ControlProblem &cp = inst.problem;
  const auto lattice = oracle::enumerate_controls_oracle(
      [&](const std::vector<double> &v) {
        ScalarField u = ScalarField::zeros(cp.mesh);
        u.values = v;
        return evaluate_cost(cp, u);
      },
      {-1.0, 0.0, 1.0}, 7);
  const auto [pt, rep] = certify_gap(inst.relaxed());
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.relaxed, lattice.best + 1e-9);
  EXPECT_LE(rep.classical_best, lattice.best + 1e-9);
}

TEST(Relaxed, GapFamilyCertifies) {
  const Instance inst = build_instance(builtin_spec("gap-family-1d"));
  const auto [pt, rep] = certify_gap(inst.relaxed());
  EXPECT_TRUE(rep.passed());
  EXPECT_GE(rep.gap, *inst.designed_gap - 1e-3);
  ASSERT_FALSE(rep.sequence.empty());
  for (std::size_t k = 1; k < rep.sequence.size(); ++k)
    EXPECT_LE(rep.sequence[k].cost, rep.sequence[k - 1].cost + 1e-3);
  EXPECT_NEAR(rep.sequence.back().cost, rep.relaxed, 5e-2);
  bool has_note = false;
  for (const auto &n : rep.notes) has_note |= !n.empty();
  EXPECT_TRUE(has_note);
}

TEST(Relaxed, NoGapWithoutLowerOrderTerm) {
  const Instance inst = build_instance(builtin_spec("linear-tracking-1d"));
  const auto [pt, rep] = certify_gap(inst.relaxed());
  EXPECT_TRUE(rep.passed());
  EXPECT_LT(std::abs(rep.gap), 1e-6);
}
