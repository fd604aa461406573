#include "qlcontrol/state_variational.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace qlc {

namespace {

Vec2 energy_grad_at(const CoefficientSet &cs, const Vec2 &g, double u) {
  if (cs.energy_grad) return cs.energy_grad(g, u);
  auto partial = [&](Vec2 e, double step) {
    return (cs.energy(g + step * e, u) - cs.energy(g - step * e, u)) / (2.0 * step);
  };
  const double step = 1e-6 * (1.0 + norm(g));
  Vec2 r{partial({1.0, 0.0}, step), 0.0};
  if (cs.dimension == 2) r.y = partial({0.0, 1.0}, step);
  return r;
}

double coupling_slope_at(const CoefficientSet &cs, double y) {
  if (cs.coupling_slope) return *cs.coupling_slope;
  const double step = 1e-6 * (1.0 + std::abs(y));
  return (cs.coupling(y + step) - cs.coupling(y - step)) / (2.0 * step);
}

void require_state(const VariationalStateProblem &p, const ScalarField &y, const ScalarField &u) {
  require_same_mesh(p.mesh, y.mesh, "variational state");
  require_same_mesh(p.mesh, u.mesh, "variational control");
  if (y.location != Location::Node || u.location != Location::Node)
    throw std::invalid_argument("variational state: nodal fields expected");
  if (!y.vanishes_on_boundary())
    throw std::invalid_argument("inner_energy: state must vanish on Dirichlet nodes");
}

bool is_linear_problem(const VariationalStateProblem &p) {
  if (!p.coeffs.energy_quadratic) return false;
  if (p.form == EnergyForm::General) return true;
  return !p.coeffs.coupling || p.coeffs.coupling_slope.has_value();
}

}  // namespace

VariationalStateProblem VariationalStateProblem::create(const Mesh &mesh, CoefficientSet coeffs,
                                                        ScalarField source, EnergyForm form,
                                                        bool check) {
  if (!coeffs.energy) throw std::invalid_argument("variational problem needs W");
  require_same_mesh(mesh, source.mesh, "variational source");
  if (check) {
    const auto growth = check_w_growth(coeffs);
    if (!growth.pass)
      throw HypothesisError("W violates the quadratic growth bounds (worst margin " +
                            std::to_string(growth.worst_margin) + ")");
    const auto convex = check_w_convexity(coeffs);
    if (!convex.pass) throw HypothesisError("W is not convex in the gradient variable");
  }
  return {mesh, std::move(coeffs), std::move(source), form};
}

double inner_energy(const VariationalStateProblem &p, const ScalarField &y, const ScalarField &u) {
  require_state(p, y, u);
  const Mesh &m = p.mesh;
  const VectorField g = gradient(y);
  const ScalarField ucell = node_to_cell(u);
  double cells = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const double uc = p.form == EnergyForm::General ? ucell.values[c] : 0.0;
    cells += p.coeffs.energy(g.values[c], uc);
  }
  double nodes = 0.0;
  for (std::size_t k = 0; k < m.node_count(); ++k) {
    double v = p.source.values[k] * y.values[k];
    if (p.form == EnergyForm::AffineInU && p.coeffs.coupling)
      v += p.coeffs.coupling(y.values[k]) * u.values[k];
    nodes += m.node_weight(k) * v;
  }
  return m.cell_volume() * cells + nodes;
}

ScalarField energy_gradient(const VariationalStateProblem &p, const ScalarField &y,
                            const ScalarField &u) {
  require_state(p, y, u);
  const Mesh &m = p.mesh;
  const VectorField g = gradient(y);
  const ScalarField ucell = node_to_cell(u);
  VectorField flux = VectorField::zeros(m);
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const double uc = p.form == EnergyForm::General ? ucell.values[c] : 0.0;
    flux.values[c] = energy_grad_at(p.coeffs, g.values[c], uc);
  }
  ScalarField r = -1.0 * divergence_weak(flux);
  for (std::size_t k : m.interior_nodes()) {
    r.values[k] += p.source.values[k];
    if (p.form == EnergyForm::AffineInU && p.coeffs.coupling)
      r.values[k] += coupling_slope_at(p.coeffs, y.values[k]) * u.values[k];
  }
  return r;
}

double euler_lagrange_residual(const VariationalStateProblem &p, const ScalarField &y,
                               const ScalarField &u) {
  return h1_seminorm(helmholtz_solve(0.0, energy_gradient(p, y, u)));
}

std::pair<ScalarField, SolveReport> solve_state(const VariationalStateProblem &p,
                                                const ScalarField &u,
                                                const VariationalOptions &opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh &m = p.mesh;
  const HelmholtzSolver lap(m, 0.0);
  SolveReport rep;
  auto stamp = [&] {
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (is_linear_problem(p)) {
    // -k Lap y + s u + f = 0.
    const double k = *p.coeffs.energy_quadratic;
    ScalarField rhs = ScalarField::zeros(m);
    const double s = (p.form == EnergyForm::AffineInU && p.coeffs.coupling)
                         ? *p.coeffs.coupling_slope
                         : 0.0;
    for (std::size_t n : m.interior_nodes())
      rhs.values[n] = -(p.source.values[n] + s * u.values[n]) / k;
    ScalarField y = lap.solve(rhs);
    rep.iterations = 1;
    rep.residual = euler_lagrange_residual(p, y, u);
    rep.cost = inner_energy(p, y, u);
    rep.trace.push_back(rep.cost);
    rep.converged = true;
    stamp();
    return {std::move(y), rep};
  }

  ScalarField y = opts.initial ? *opts.initial : ScalarField::zeros(m);
  for (std::size_t k = 0; k < y.values.size(); ++k)
    if (m.is_dirichlet(k)) y.values[k] = 0.0;

  double energy = inner_energy(p, y, u);
  ScalarField grad = energy_gradient(p, y, u);
  ScalarField dir = -1.0 * lap.solve(grad);
  double res = h1_seminorm(dir);
  rep.trace.push_back(energy);
  double step = 1.0;
  ScalarField y_prev, grad_prev;
  bool have_prev = false;

  std::size_t it = 0;
  while (res > opts.tolerance) {
    if (it >= opts.max_iterations) {
      stamp();
      throw NonConvergenceError("variational state solve did not converge", it, res);
    }
    if (have_prev) {
      const ScalarField s = y - y_prev;
      const ScalarField r = grad - grad_prev;
      const double sr = inner(s, r);
      const double ss = h1_seminorm(s);
      step = sr > 0.0 ? ss * ss / sr : 1.0;
    }
    // Directional derivative of I along dir (Euclidean gradient is h^N * grad).
    const double slope = inner(grad, dir);
    const double slack = 1e-14 * (std::abs(energy) + 1.0);
    ScalarField trial;
    double trial_energy = energy;
    bool accepted = false;
    for (int bisect = 0; bisect < 60; ++bisect) {
      trial = y + step * dir;
      trial_energy = inner_energy(p, trial, u);
      if (trial_energy <= energy + 1e-4 * step * slope + slack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stamp();
      throw NonConvergenceError("variational line search stalled", it, res);
    }
    y_prev = std::move(y);
    grad_prev = std::move(grad);
    have_prev = true;
    y = std::move(trial);
    rep.increments.push_back(h1_seminorm(y - y_prev));
    energy = trial_energy;
    grad = energy_gradient(p, y, u);
    dir = -1.0 * lap.solve(grad);
    res = h1_seminorm(dir);
    rep.trace.push_back(energy);
    ++it;
  }
  rep.iterations = it;
  rep.residual = res;
  rep.cost = energy;
  rep.converged = true;
  stamp();
  return {std::move(y), rep};
}

HypothesisReport verify_minimality(const VariationalStateProblem &p, const ScalarField &y,
                                   const ScalarField &u, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double rhos[] = {1e-2, 1e-1, 1.0};
  const double base = inner_energy(p, y, u);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const double rho = rhos[t % 3];
    ScalarField z = y;
    for (std::size_t k : p.mesh.interior_nodes()) z.values[k] += rho * dist(rng);
    worst = std::min(worst, inner_energy(p, z, u) - base);
  }
  HypothesisReport r;
  r.hypothesis = "minimality";
  r.samples = trials;
  r.worst_margin = worst;
  r.pass = worst >= -1e-10;
  return r;
}

}  // namespace qlc
