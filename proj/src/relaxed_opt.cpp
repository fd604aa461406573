#include "qlcontrol/relaxed_opt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace qlc {

RelaxedProblem RelaxedProblem::create(ControlProblem base, std::size_t state_atoms,
                                      std::size_t control_atoms,
                                      std::optional<double> designed_gap) {
  if (base.regime() != Regime::Quasilinear)
    throw std::invalid_argument("relaxed problem needs a quasilinear base problem");
  if (!base.quasilinear().unique)
    throw HypothesisError("relaxed problem needs b > L^2/4");
  if (state_atoms == 0 || control_atoms == 0)
    throw std::invalid_argument("relaxed problem: atom budgets must be positive");
  return RelaxedProblem{std::move(base), state_atoms, control_atoms, designed_gap};
}

namespace {

double checker(const Mesh &m, std::size_t k) {
  if (m.dimension() == 1) return 0.0;
  const std::size_t p = m.nodes_per_axis();
  return ((k % p) + (k / p)) % 2 == 0 ? 1.0 : -1.0;
}

// Least-squares coefficients of u on the kernel modes {1, checkerboard}.
ControlGauge kernel_part(const ScalarField &u) {
  const Mesh &m = u.mesh;
  const double n = static_cast<double>(u.values.size());
  double s1 = 0.0, sc = 0.0, cc = 0.0, c1 = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const double c = checker(m, k);
    s1 += u.values[k];
    sc += u.values[k] * c;
    cc += c * c;
    c1 += c;
  }
  if (m.dimension() == 1) return {s1 / n, 0.0};
  // [n c1; c1 cc] [alpha; beta] = [s1; sc]
  const double det = n * cc - c1 * c1;
  return {(s1 * cc - c1 * sc) / det, (n * sc - c1 * s1) / det};
}

}  // namespace

ControlGauge gauge_of(const ScalarField &u) { return kernel_part(u); }

ScalarField recover_control(const YoungMeasureField &mu, const ControlGauge &gauge) {
  const Mesh &m = mu.mesh();
  ScalarField p = m.dimension() == 1
                      ? barycenter_potential_1d(mu, 0.0)
                      : GradientLeastSquares(m, false).potential(barycenter(mu));
  const ControlGauge k = kernel_part(p);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double c = checker(m, i);
    p.values[i] += (gauge.constant - k.constant) + (gauge.checkerboard - k.checkerboard) * c;
  }
  return p;
}

namespace {

ScalarField abar_of(const RelaxedProblem &rp, const YoungMeasureField &nu) {
  const LowerOrderMap &a = rp.state().coeffs.lower;
  return moment(nu, [&a](const Vec2 &l) { return a(l); });
}

double h1_distance(const ScalarField &a, const ScalarField &b) {
  const ScalarField d = a - b;
  const double l2 = l2_norm(d), h1 = h1_seminorm(d);
  return std::sqrt(l2 * l2 + h1 * h1);
}

double relaxed_regularizer(const RelaxedProblem &rp, const YoungMeasureField &mu,
                           const ScalarField &u) {
  if (rp.base.regularizer == Regularizer::Gradient)
    return 0.5 * rp.base.tychonov * second_moment(mu);
  return regularizer_term(rp.base, u);
}

}  // namespace

MvState solve_mv_state(const RelaxedProblem &rp, const ScalarField &u,
                       const YoungMeasureField &nu) {
  require_same_mesh(rp.base.mesh, nu.mesh(), "measure-valued state");
  if (classify(nu) != MeasureClass::PH10)
    throw InfeasibleMeasure("state measure is not in PH10: its barycenter is not a gradient of "
                            "a function vanishing on the boundary");
  const QuasilinearStateProblem &q = rp.state();
  const ScalarField rhs = q.source_of(u) - cell_to_node(abar_of(rp, nu));
  MvState s;
  s.y = helmholtz_solve(q.b(), rhs);
  s.consistency = l2_norm(gradient(s.y) - barycenter(nu));
  return s;
}

Restored restore_feasibility(const RelaxedProblem &rp, const ScalarField &u,
                             const YoungMeasureField &nu, const std::optional<ScalarField> &warm,
                             double tolerance) {
  const QuasilinearStateProblem &q = rp.state();
  const Mesh &m = q.mesh;
  require_same_mesh(m, nu.mesh(), "restoration");
  const std::size_t K = nu.atoms_per_cell();
  const VectorField bary = barycenter(nu);
  std::vector<Vec2> offsets(nu.atoms().size());
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    for (std::size_t k = 0; k < K; ++k) offsets[c * K + k] = nu.atom(c, k) - bary.values[c];

  const HelmholtzSolver helm(m, q.b());
  const ScalarField f = q.source_of(u);
  const LowerOrderMap &a = q.coeffs.lower;
  ScalarField y = warm ? *warm : ScalarField::zeros(m);
  VectorField g = gradient(y);
  ScalarField abar = ScalarField::zeros(m, Location::Cell);
  std::size_t it = 0;
  double inc = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double p = nu.weight(c, k);
        if (p != 0.0) s += p * a(g.values[c] + offsets[c * K + k]);
      }
      abar.values[c] = s;
    }
    ScalarField next = helm.solve(f - cell_to_node(abar));
    inc = h1_distance(next, y);
    y = std::move(next);
    ++it;
    if (inc <= tolerance || (it > 5 && inc < 1e-14 * (1.0 + y.max_abs()))) break;
    if (it >= 10000) throw NonConvergenceError("feasibility restoration did not converge", it, inc);
    g = gradient(y);
  }
  Restored r;
  r.nu = nu;
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    for (std::size_t k = 0; k < K; ++k) r.nu.atom(c, k) = g.values[c] + offsets[c * K + k];
  r.nu.set_tag(MeasureClass::PH10);
  r.consistency = l2_norm(gradient(y) - g);
  r.y = std::move(y);
  r.iterations = it;
  return r;
}

double evaluate_relaxed_cost(const RelaxedProblem &rp, const YoungMeasureField &mu,
                             const ControlGauge &gauge, const YoungMeasureField &nu) {
  const ScalarField u = recover_control(mu, gauge);
  const MvState s = solve_mv_state(rp, u, nu);
  if (s.consistency > kFeasibilityTolerance) {
    std::ostringstream os;
    os << "state measure is infeasible: ||grad y - barycenter|| = " << s.consistency;
    throw InfeasibleMeasure(os.str());
  }
  return tracking_term(rp.base, s.y) + relaxed_regularizer(rp, mu, u);
}

RelaxedPoint dirac_embedding(const RelaxedProblem &rp, const ScalarField &u) {
  StateTolerances tol;
  tol.quasilinear = 1e-14;
  RelaxedPoint p;
  p.y = solve_state_for(rp.base, u, std::nullopt, tol);
  p.mu = dirac_field(gradient(u), rp.control_atoms);
  p.gauge = gauge_of(u);
  p.nu = dirac_field(gradient(p.y), rp.state_atoms);
  p.cost = evaluate_relaxed_cost(rp, p.mu, p.gauge, p.nu);
  return p;
}

namespace {

double cost_derivative(const CostIntegrand &F, double y, double yd) {
  const double e = 1e-6 * (1.0 + std::abs(y));
  return (F(y + e, yd) - F(y - e, yd)) / (2.0 * e);
}

Vec2 lower_gradient(const LowerOrderMap &a, const Vec2 &l, int dim) {
  const double e = 1e-6 * (1.0 + norm(l));
  Vec2 r;
  r.x = (a(l + Vec2{e, 0.0}) - a(l - Vec2{e, 0.0})) / (2.0 * e);
  if (dim == 2) r.y = (a(l + Vec2{0.0, e}) - a(l - Vec2{0.0, e})) / (2.0 * e);
  return r;
}

// Sensitivity of the cost to the cell moments abar, through the coupled
// state map y = H^{-1}(f - P abar(grad y)).
ScalarField moment_sensitivity(const RelaxedProblem &rp, const YoungMeasureField &nu,
                               const ScalarField &y) {
  const QuasilinearStateProblem &q = rp.state();
  const Mesh &m = q.mesh;
  const int dim = m.dimension();
  const std::size_t K = nu.atoms_per_cell();
  ScalarField jy = ScalarField::zeros(m);
  for (std::size_t i = 0; i < jy.values.size(); ++i)
    jy.values[i] =
        m.node_weight(i) * cost_derivative(rp.base.cost, y.values[i], rp.base.target.values[i]);
  VectorField D = VectorField::zeros(m);
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    Vec2 s;
    for (std::size_t k = 0; k < K; ++k) {
      const double p = nu.weight(c, k);
      if (p != 0.0) s += p * lower_gradient(q.coeffs.lower, nu.atom(c, k), dim);
    }
    D.values[c] = s;
  }
  const HelmholtzSolver helm(m, q.b());
  ScalarField z = helm.solve(jy);
  for (int it = 0; it < 200; ++it) {
    const ScalarField zc = node_to_cell(z);
    VectorField w = D;
    for (std::size_t c = 0; c < m.cell_count(); ++c) w.values[c] = zc.values[c] * D.values[c];
    ScalarField next = helm.solve(jy + divergence_weak(w));
    const double d = (next - z).max_abs();
    z = std::move(next);
    if (d <= 1e-14 * (1.0 + z.max_abs())) break;
  }
  return -1.0 * node_to_cell(z);
}

struct CellMove {
  double gain = 0.0;
  Vec2 lo, hi;
  double w_lo = 1.0, w_hi = 0.0;
};

// Minimizes s * [t2 a(g - t1 e) + t1 a(g + t2 e)] / (t1 + t2) over directions
// and t1, t2 > 0 against the current value s * abar.
CellMove envelope_move(const LowerOrderMap &a, double s, const Vec2 &g, double current, int dim,
                       double radius, std::size_t points) {
  CellMove best;
  if (s == 0.0) return best;
  const std::vector<Vec2> dirs =
      dim == 1 ? std::vector<Vec2>{{1.0, 0.0}}
               : std::vector<Vec2>{{1.0, 0.0},
                                   {0.0, 1.0},
                                   {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2},
                                   {std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}};
  const std::size_t np = dim == 1 ? points : std::min<std::size_t>(points, 24);
  const double step = radius / static_cast<double>(np);
  auto value = [&](const Vec2 &e, double t1, double t2) {
    return s * (t2 * a(g - t1 * e) + t1 * a(g + t2 * e)) / (t1 + t2);
  };
  double best_val = s * current;
  Vec2 best_e;
  double b1 = 0.0, b2 = 0.0;
  std::vector<double> minus(np), plus(np);
  for (const Vec2 &e : dirs) {
    for (std::size_t i = 0; i < np; ++i) {
      const double t = step * static_cast<double>(i + 1);
      minus[i] = a(g - t * e);
      plus[i] = a(g + t * e);
    }
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < np; ++j) {
        const double t1 = step * static_cast<double>(i + 1);
        const double t2 = step * static_cast<double>(j + 1);
        const double v = s * (t2 * minus[i] + t1 * plus[j]) / (t1 + t2);
        if (v < best_val) {
          best_val = v;
          best_e = e;
          b1 = t1;
          b2 = t2;
        }
      }
  }
  if (b1 == 0.0) return best;
  // Pattern search around the grid optimum.
  double d = step;
  while (d > 1e-13) {
    bool moved = false;
    const double cand[4][2] = {{b1 + d, b2}, {b1 - d, b2}, {b1, b2 + d}, {b1, b2 - d}};
    for (const auto &c : cand) {
      if (c[0] <= 0.0 || c[1] <= 0.0 || c[0] > 2.0 * radius || c[1] > 2.0 * radius) continue;
      const double v = value(best_e, c[0], c[1]);
      if (v < best_val) {
        best_val = v;
        b1 = c[0];
        b2 = c[1];
        moved = true;
      }
    }
    if (!moved) d *= 0.5;
  }
  best.gain = s * current - best_val;
  best.lo = g - b1 * best_e;
  best.hi = g + b2 * best_e;
  best.w_lo = b2 / (b1 + b2);
  best.w_hi = b1 / (b1 + b2);
  return best;
}

struct Iterate {
  ScalarField u;
  YoungMeasureField nu;
  ScalarField y;
  double cost = 0.0;
};

double iterate_cost(const RelaxedProblem &rp, const ScalarField &u, const ScalarField &y) {
  return tracking_term(rp.base, y) + regularizer_term(rp.base, u);
}

// One envelope sweep; returns the Frank-Wolfe style predicted gain and
// whether a move was accepted.
std::pair<double, bool> measure_step(const RelaxedProblem &rp, Iterate &cur,
                                     const RelaxedOptions &opts) {
  const Mesh &m = rp.base.mesh;
  const std::size_t K = cur.nu.atoms_per_cell();
  if (K < 2) return {0.0, false};
  const ScalarField sens = moment_sensitivity(rp, cur.nu, cur.y);
  const ScalarField abar = abar_of(rp, cur.nu);
  const VectorField g = barycenter(cur.nu);
  std::vector<CellMove> moves(m.cell_count());
  double total = 0.0;
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    moves[c] = envelope_move(rp.state().coeffs.lower, sens.values[c], g.values[c],
                             abar.values[c], m.dimension(), opts.envelope_radius,
                             opts.envelope_points);
    if (moves[c].gain > 0.0) {
      total += moves[c].gain;
      order.push_back(c);
    }
  }
  if (order.empty()) return {0.0, false};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return moves[x].gain > moves[y].gain; });
  const ScalarField u = cur.u;
  for (std::size_t count = order.size(); count >= 1; count /= 2) {
    YoungMeasureField trial = cur.nu;
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t c = order[r];
      trial.atom(c, 0) = moves[c].lo;
      trial.weight(c, 0) = moves[c].w_lo;
      trial.atom(c, 1) = moves[c].hi;
      trial.weight(c, 1) = moves[c].w_hi;
      for (std::size_t k = 2; k < K; ++k) {
        trial.atom(c, k) = g.values[c];
        trial.weight(c, k) = 0.0;
      }
    }
    Restored rs;
    try {
      rs = restore_feasibility(rp, u, trial, cur.y);
    } catch (const NonConvergenceError &) {
      continue;
    }
    const double c = iterate_cost(rp, u, rs.y);
    if (c < cur.cost) {
      cur.nu = std::move(rs.nu);
      cur.y = std::move(rs.y);
      cur.cost = c;
      return {total, true};
    }
    if (count == 1) break;
  }
  return {total, false};
}

// Descent in u with the atom offsets of nu frozen.
std::pair<double, bool> control_step(const RelaxedProblem &rp, Iterate &cur,
                                     const RelaxedOptions &opts) {
  const YoungMeasureField shape = cur.nu;
  const CostFunction cost = [&rp, &shape](const ScalarField &u,
                                          const std::optional<ScalarField> &warm) {
    Restored r = restore_feasibility(rp, u, shape, warm);
    return CostSample{iterate_cost(rp, u, r.y), std::move(r.y)};
  };
  ControlOptions co;
  co.max_iterations = opts.control_iterations;
  auto [u, rep] = minimize_fd(cost, cur.u, co);
  const bool moved = rep.cost < cur.cost;
  if (moved) {
    Restored r = restore_feasibility(rp, u, shape, cur.y);
    const double c = iterate_cost(rp, u, r.y);
    if (c < cur.cost) {
      cur.u = std::move(u);
      cur.nu = std::move(r.nu);
      cur.y = std::move(r.y);
      cur.cost = c;
      return {rep.residual, true};
    }
  }
  return {rep.residual, false};
}

RelaxedPoint to_point(const RelaxedProblem &rp, const Iterate &it) {
  RelaxedPoint p;
  p.mu = dirac_field(gradient(it.u), rp.control_atoms);
  p.gauge = gauge_of(it.u);
  p.nu = it.nu;
  p.y = it.y;
  p.cost = evaluate_relaxed_cost(rp, p.mu, p.gauge, p.nu);
  return p;
}

}  // namespace

bool RelaxationReport::passed() const {
  return std::all_of(certificates.begin(), certificates.end(),
                     [](const Certificate &c) { return c.pass; });
}

std::pair<RelaxedPoint, RelaxationReport> optimize_relaxed(const RelaxedProblem &rp,
                                                           const RelaxedPoint &init,
                                                           const RelaxedOptions &opts) {
  const auto t0 = std::chrono::steady_clock::now();
  RelaxationReport rep;
  rep.instance = rp.state().coeffs.name;
  rep.designed_gap = rp.designed_gap;

  Iterate cur;
  cur.u = recover_control(init.mu, init.gauge);
  {
    YoungMeasureField nu = init.nu;
    if (nu.atoms_per_cell() != rp.state_atoms)
      throw std::invalid_argument("initial state measure has the wrong atom budget");
    Restored r = restore_feasibility(rp, cur.u, nu, init.y.values.empty()
                                                        ? std::nullopt
                                                        : std::optional<ScalarField>(init.y));
    cur.nu = std::move(r.nu);
    cur.y = std::move(r.y);
  }
  cur.cost = iterate_cost(rp, cur.u, cur.y);
  rep.trace.push_back(cur.cost);

  double stat = std::numeric_limits<double>::infinity();
  std::size_t outer = 0;
  for (; outer < opts.max_outer; ++outer) {
    const double start = cur.cost;
    double gap = 0.0;
    for (std::size_t inner = 0; inner < opts.max_inner; ++inner) {
      const double before = cur.cost;
      auto [predicted, accepted] = measure_step(rp, cur, opts);
      gap = predicted;
      if (accepted) rep.trace.push_back(cur.cost);
      if (!accepted || before - cur.cost <= 1e-15 * (1.0 + std::abs(cur.cost))) break;
    }
    auto [grad, moved] = control_step(rp, cur, opts);
    if (moved) rep.trace.push_back(cur.cost);
    stat = gap + grad;
    if (stat <= opts.stationarity) break;
    if (start - cur.cost <= 1e-13 * (1.0 + std::abs(cur.cost))) break;
  }
  rep.iterations = outer;
  rep.stationarity = stat;
  rep.converged = stat <= opts.stationarity;
  if (!rep.converged)
    rep.warnings.push_back("relaxed descent stopped on stagnation or cap before stationarity");

  RelaxedPoint best = to_point(rp, cur);
  const MvState s = solve_mv_state(rp, cur.u, best.nu);
  rep.consistency = s.consistency;
  rep.feasible = s.consistency <= kFeasibilityTolerance;
  rep.normalization_error = std::max(best.nu.normalization_error(), best.mu.normalization_error());
  rep.relaxed = best.cost;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(best), rep};
}

namespace {

std::vector<ScalarField> sample_controls(const Mesh &m, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  std::uniform_int_distribution<int> freq(1, std::max<int>(1, m.cells_per_axis() / 4));
  const double pi = std::numbers::pi;
  std::vector<ScalarField> out;
  out.push_back(ScalarField::constant(m, 1.0));
  out.push_back(ScalarField::constant(m, -1.0));
  for (std::size_t s = 0; s < count; ++s) {
    const double c0 = amp(rng);
    const double c1 = amp(rng), c2 = amp(rng), c3 = amp(rng);
    const bool oscillating = s % 2 == 1;
    const int k = freq(rng);
    const double ao = amp(rng);
    out.push_back(ScalarField::from_function(m, [=](const Vec2 &x) {
      double v = c0 + c1 * std::cos(pi * x.x) + c2 * std::cos(2 * pi * x.x) +
                 c3 * std::cos(pi * x.y);
      if (oscillating) v += ao * std::sin(2 * pi * k * x.x) * std::cos(2 * pi * k * x.y);
      return v;
    }));
  }
  return out;
}

Certificate cert(std::string name, double value, double bound, bool pass, std::string note = {}) {
  return Certificate{std::move(name), value, bound, pass, std::move(note)};
}

bool two_atom_cells(const YoungMeasureField &ym) {
  for (std::size_t c = 0; c < ym.cell_count(); ++c) {
    int n = 0;
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k) n += ym.weight(c, k) > 0.0;
    if (n > 2) return false;
  }
  return true;
}

}  // namespace

std::pair<RelaxedPoint, RelaxationReport> certify_gap(const RelaxedProblem &rp,
                                                      const GapOptions &opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const ControlProblem &cp = rp.base;
  const Mesh &m = cp.mesh;

  // Classical side: samples, then descent from zero and from the best sample.
  double best = std::numeric_limits<double>::infinity();
  ScalarField best_u = ScalarField::zeros(m);
  for (const ScalarField &u : sample_controls(m, opts.samples, opts.seed)) {
    const double c = evaluate_cost(cp, u);
    if (c < best) {
      best = c;
      best_u = u;
    }
  }
  std::vector<std::string> warnings;
  for (const ScalarField &u0 : {ScalarField::zeros(m), best_u}) {
    auto [u, r] = optimize_control(cp, u0, opts.control);
    for (const auto &w : r.warnings) warnings.push_back("classical: " + w);
    const double c = evaluate_cost(cp, u);
    if (c < best) {
      best = c;
      best_u = u;
    }
  }

  const RelaxedPoint emb = dirac_embedding(rp, best_u);
  auto [point, rep] = optimize_relaxed(rp, emb, opts.relaxed);
  rep.classical_best = best;
  rep.gap = best - rep.relaxed;
  rep.dirac_residual = std::abs(emb.cost - best);
  rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());

  rep.certificates.push_back(cert("sub-relaxation", rep.relaxed - best, 1e-8,
                                  rep.relaxed <= best + 1e-8, "relaxed <= classical + 1e-8"));
  rep.certificates.push_back(cert("dirac-embedding", rep.dirac_residual, 1e-10,
                                  rep.dirac_residual <= 1e-10,
                                  "relaxed cost of the Dirac embedding equals the classical cost"));
  rep.certificates.push_back(cert("feasibility", rep.consistency, kFeasibilityTolerance,
                                  rep.feasible, "||grad y - barycenter(nu)||"));
  rep.certificates.push_back(cert("normalization", rep.normalization_error, 1e-12,
                                  rep.normalization_error <= 1e-12));
  const bool nu_class = classify(point.nu) == MeasureClass::PH10;
  const MeasureClass mu_class = classify(point.mu);
  rep.certificates.push_back(cert("class-membership", 0.0, 0.0,
                                  nu_class && mu_class != MeasureClass::Unconstrained,
                                  std::string("nu ") + (nu_class ? "PH10" : "not PH10") +
                                      ", mu " + to_string(mu_class)));
  if (rp.designed_gap) {
    const double need = *rp.designed_gap - 1e-3;
    rep.certificates.push_back(cert("designed-gap", rep.gap, need, rep.gap >= need,
                                    "classical - relaxed >= designed margin - 1e-3"));
  }
  if (opts.sequence && m.dimension() == 1 && two_atom_cells(point.mu) &&
      two_atom_cells(point.nu)) {
    const ScalarField u = recover_control(point.mu, point.gauge);
    rep.sequence = minimizing_sequence_demo(cp, point.mu, u.values[0], point.nu, opts.j_list);
    bool monotone = true;
    for (std::size_t i = 1; i < rep.sequence.size(); ++i)
      monotone = monotone && rep.sequence[i].cost <= rep.sequence[i - 1].cost + 1e-3;
    rep.certificates.push_back(cert("sequence-monotone", 0.0, 1e-3, monotone,
                                    "laminate costs non-increasing in j within 1e-3"));
    if (!rep.sequence.empty()) {
      const double d = std::abs(rep.sequence.back().cost - rep.relaxed);
      rep.certificates.push_back(cert("sequence-limit", d, 5e-2, d <= 5e-2,
                                      "|laminate cost at largest j - relaxed|"));
    }
  }
  if (rep.gap > 1e-3)
    rep.notes.push_back(
        "a positive discrete gap at fixed h may reflect the continuum problem or the "
        "discretization; it is bounded here only through sampling of classical controls");
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(point), rep};
}

}  // namespace qlc
