#include "qlcontrol/state_quasilinear.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "qlcontrol/state_monotone.hpp"

namespace qlc {

double uniqueness_threshold(double lipschitz) {
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("uniqueness_threshold: L must be >= 0");
  return 0.25 * lipschitz * lipschitz;
}

double default_zero_order(double lipschitz) {
  return std::max(1.0, 2.0 * uniqueness_threshold(lipschitz));
}

QuasilinearStateProblem QuasilinearStateProblem::create(const Mesh &mesh, CoefficientSet coeffs,
                                                        bool check) {
  if (!coeffs.source) throw std::invalid_argument("quasilinear problem needs a source f");
  if (!coeffs.lower) coeffs.lower = [](const Vec2 &) { return 0.0; };
  if (coeffs.dimension != mesh.dimension())
    throw std::invalid_argument("quasilinear problem: coefficient dimension differs from mesh");
  const double L = coeffs.k.lipschitz;
  const double b = coeffs.k.zero_order;
  const double thr = uniqueness_threshold(L);
  if (!(b > thr)) {
    std::ostringstream os;
    os << "b = " << b << " does not exceed the uniqueness threshold L^2/4 = " << thr
       << " (L = " << L << ")";
    throw HypothesisError(os.str());
  }
  QuasilinearStateProblem p{mesh, std::move(coeffs), true, {}};
  if (b < 1.1 * thr) {
    std::ostringstream os;
    os << "b = " << b << " is within 10% of the uniqueness threshold " << thr;
    p.warnings.push_back(os.str());
  }
  if (check) {
    if (p.coeffs.lower(Vec2{}) != 0.0) throw HypothesisError("a(0) must vanish");
    CoefficientSet lower_only;
    lower_only.dimension = p.coeffs.dimension;
    lower_only.lower = p.coeffs.lower;
    lower_only.k = p.coeffs.k;
    const auto g = check_growth(lower_only);
    if (!g.pass) throw HypothesisError("|a(y)| <= C|y| fails for the declared C");
    const auto l = check_lipschitz(p.coeffs);
    if (!l.pass) throw HypothesisError("a is not Lipschitz with the declared L");
  }
  return p;
}

ScalarField QuasilinearStateProblem::source_of(const ScalarField &u) const {
  require_same_mesh(mesh, u.mesh, "quasilinear source");
  ScalarField f = ScalarField::zeros(mesh);
  for (std::size_t k = 0; k < f.values.size(); ++k)
    f.values[k] = coeffs.source(mesh.node_coords(k), u.values[k]);
  return f;
}

ScalarField QuasilinearStateProblem::lower_of(const ScalarField &y) const {
  const VectorField g = gradient(y);
  ScalarField a = ScalarField::zeros(mesh, Location::Cell);
  for (std::size_t c = 0; c < g.values.size(); ++c) a.values[c] = coeffs.lower(g.values[c]);
  return a;
}

namespace {

double h1_norm(const ScalarField &d) {
  const double l2 = l2_norm(d);
  const double h1 = h1_seminorm(d);
  return std::sqrt(l2 * l2 + h1 * h1);
}

}  // namespace

double quasilinear_strong_residual(const QuasilinearStateProblem &p, const ScalarField &y,
                                   const ScalarField &u) {
  const ScalarField f = p.source_of(u);
  ScalarField r = neg_laplacian(y) + cell_to_node(p.lower_of(y));
  for (std::size_t k : p.mesh.interior_nodes()) r.values[k] += p.b() * y.values[k] - f.values[k];
  return l2_norm(r);
}

QuasilinearSolver::QuasilinearSolver(const QuasilinearStateProblem &p)
    : p_(&p), helm_(p.mesh, p.b()) {}

std::pair<ScalarField, SolveReport> QuasilinearSolver::solve(const ScalarField &u,
                                                             const QuasilinearOptions &opts) const {
  const auto t0 = std::chrono::steady_clock::now();
  const QuasilinearStateProblem &p = *p_;
  const Mesh &m = p.mesh;
  const ScalarField f = p.source_of(u);
  ScalarField y = opts.initial ? *opts.initial : ScalarField::zeros(m);
  for (std::size_t k = 0; k < y.values.size(); ++k)
    if (m.is_dirichlet(k)) y.values[k] = 0.0;

  SolveReport rep;
  rep.warnings = p.warnings;
  double inc = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (inc > opts.tolerance) {
    if (it >= opts.max_iterations) {
      std::ostringstream os;
      os << "Picard iteration did not converge; measured contraction ratio ";
      const auto &v = rep.increments;
      os << (v.size() >= 2 ? v[v.size() - 1] / v[v.size() - 2] : 0.0);
      throw NonConvergenceError(os.str(), it, inc);
    }
    ScalarField rhs = f - cell_to_node(p.lower_of(y));
    ScalarField next = helm_.solve(rhs);
    inc = h1_norm(next - y);
    y = std::move(next);
    rep.increments.push_back(inc);
    ++it;
    // Stagnation at roundoff: increments stop shrinking far below tolerance.
    if (it > 5 && inc < 1e-14 * (1.0 + y.max_abs())) break;
  }
  rep.iterations = it;
  rep.residual = quasilinear_strong_residual(p, y, u);
  rep.converged = true;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(y), rep};
}

std::pair<ScalarField, SolveReport> solve_quasilinear(const QuasilinearStateProblem &p,
                                                      const ScalarField &u,
                                                      const QuasilinearOptions &opts) {
  return QuasilinearSolver(p).solve(u, opts);
}

HypothesisReport verify_uniqueness(const QuasilinearStateProblem &p, const ScalarField &u,
                                   std::size_t trials, std::uint64_t seed) {
  if (!p.unique) throw HypothesisError("verify_uniqueness requires b > L^2/4");
  const QuasilinearSolver solver(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<ScalarField> sols;
  for (std::size_t t = 0; t < trials; ++t) {
    QuasilinearOptions o;
    ScalarField y0 = ScalarField::zeros(p.mesh);
    for (std::size_t k : p.mesh.interior_nodes()) y0.values[k] = dist(rng);
    o.initial = std::move(y0);
    sols.push_back(solver.solve(u, o).first);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      worst = std::max(worst, (sols[i] - sols[j]).max_abs());
  HypothesisReport r;
  r.hypothesis = "uniqueness";
  r.samples = trials;
  r.worst_margin = 1e-6 - worst;
  r.pass = r.worst_margin >= 0.0;
  return r;
}

AprioriBound apriori_gradient_bound(const QuasilinearStateProblem &p, const ScalarField &u,
                                    const std::optional<ScalarField> &solved) {
  const double C = p.coeffs.k.growth;
  const double factor = 1.0 - C * C / (4.0 * p.b());
  if (!(factor > 0.0)) {
    std::ostringstream os;
    os << "a-priori bound needs 1 - C^2/(4b) > 0, got " << factor;
    throw HypothesisError(os.str());
  }
  const ScalarField y = solved ? *solved : solve_quasilinear(p, u).first;
  AprioriBound r;
  r.bound = poincare_constant(p.mesh.dimension()) * l2_norm(p.source_of(u)) / factor;
  r.gradient = h1_seminorm(y);
  r.ratio = r.bound > 0.0 ? r.gradient / r.bound : (r.gradient > 0.0 ? INFINITY : 0.0);
  r.holds = r.gradient <= r.bound * (1.0 + 1e-12) + 1e-14;
  return r;
}

}  // namespace qlc
