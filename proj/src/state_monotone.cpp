#include "qlcontrol/state_monotone.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace qlc {

namespace {

VectorField flux_of(const MonotoneStateProblem &p, const ScalarField &y) {
  VectorField g = gradient(y);
  for (auto &v : g.values) v = p.coeffs.flux(v);
  return g;
}

// Strong residual -div A(grad y) - f at interior nodes.
ScalarField strong_residual(const MonotoneStateProblem &p, const ScalarField &y,
                            const ScalarField &f) {
  ScalarField r = -1.0 * divergence_weak(flux_of(p, y));
  for (std::size_t k : p.mesh.interior_nodes()) r.values[k] -= f.values[k];
  return r;
}

}  // namespace

double poincare_constant(int dimension) {
  return dimension == 1 ? 1.0 / std::numbers::pi : 1.0 / (std::numbers::sqrt2 * std::numbers::pi);
}

MonotoneStateProblem MonotoneStateProblem::create(const Mesh &mesh, CoefficientSet coeffs,
                                                  bool check) {
  if (!coeffs.flux) throw std::invalid_argument("monotone problem needs a flux A");
  if (!coeffs.source) throw std::invalid_argument("monotone problem needs a source f");
  if (coeffs.dimension != mesh.dimension())
    throw std::invalid_argument("monotone problem: coefficient dimension differs from mesh");
  if (!(coeffs.k.monotonicity > 0.0) || !(coeffs.k.growth > coeffs.k.monotonicity))
    throw HypothesisError("monotone problem needs 0 < c < C");
  if (check) {
    const auto mono = check_monotonicity(coeffs);
    if (!mono.pass)
      throw HypothesisError("flux is not strongly monotone with c = " +
                            std::to_string(coeffs.k.monotonicity));
    const auto growth = check_growth(coeffs);
    if (!growth.pass)
      throw HypothesisError("flux violates the growth bounds with C = " +
                            std::to_string(coeffs.k.growth));
  }
  return {mesh, std::move(coeffs)};
}

ScalarField MonotoneStateProblem::source_of(const ScalarField &u) const {
  require_same_mesh(mesh, u.mesh, "monotone source");
  ScalarField f = ScalarField::zeros(mesh);
  for (std::size_t k = 0; k < f.values.size(); ++k)
    f.values[k] = coeffs.source(mesh.node_coords(k), u.values[k]);
  return f;
}

double monotone_contraction_bound(double tau, double c, double C) {
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * tau * c + tau * tau * C * C));
}

double monotone_residual(const MonotoneStateProblem &p, const ScalarField &y,
                         const ScalarField &u) {
  const ScalarField f = p.source_of(u);
  return h1_seminorm(helmholtz_solve(0.0, strong_residual(p, y, f)));
}

std::pair<ScalarField, SolveReport> solve_monotone(const MonotoneStateProblem &p,
                                                   const ScalarField &u,
                                                   const MonotoneOptions &opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const double c = p.coeffs.k.monotonicity;
  const double C = p.coeffs.k.growth;
  const double tau = opts.step.value_or(c / (C * C));
  if (!(tau > 0.0 && tau < 2.0 * c / (C * C)))
    throw HypothesisError("monotone step must lie in (0, 2c/C^2)");

  const Mesh &m = p.mesh;
  const HelmholtzSolver lap(m, 0.0);
  const ScalarField f = p.source_of(u);
  ScalarField y = opts.initial ? *opts.initial : ScalarField::zeros(m);
  for (std::size_t k = 0; k < y.values.size(); ++k)
    if (m.is_dirichlet(k)) y.values[k] = 0.0;

  SolveReport rep;
  ScalarField lifted = lap.solve(strong_residual(p, y, f));
  double res = h1_seminorm(lifted);
  rep.trace.push_back(res);
  std::size_t it = 0;
  while (res > opts.tolerance) {
    if (it >= opts.max_iterations)
      throw NonConvergenceError("monotone state solve did not converge", it, res);
    for (std::size_t k : m.interior_nodes()) y.values[k] -= tau * lifted.values[k];
    rep.increments.push_back(tau * res);
    lifted = lap.solve(strong_residual(p, y, f));
    res = h1_seminorm(lifted);
    rep.trace.push_back(res);
    ++it;
  }
  rep.iterations = it;
  rep.residual = res;
  rep.converged = true;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(y), rep};
}

HypothesisReport verify_limit_identity(const MonotoneStateProblem &p, const ScalarField &y,
                                       const ScalarField &u) {
  const Mesh &m = p.mesh;
  const ScalarField f = p.source_of(u);
  const VectorField A = flux_of(p, y);
  // <A, grad e_k>_cells = -h^N div_weak(A)_k and <f, e_k>_nodes = h^N f_k.
  const ScalarField div = divergence_weak(A);
  double worst = 0.0;
  for (std::size_t k : m.interior_nodes())
    worst = std::max(worst, std::abs(m.cell_volume() * (-div.values[k] - f.values[k])));
  HypothesisReport r;
  r.hypothesis = "limit-identity";
  r.samples = m.interior_nodes().size();
  r.worst_margin = 1e-7 * (1.0 + l2_norm(f)) - worst;
  r.pass = r.worst_margin >= 0.0;
  return r;
}

}  // namespace qlc
