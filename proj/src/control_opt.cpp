#include "qlcontrol/control_opt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlc {

const char *to_string(Regime r) {
  switch (r) {
    case Regime::Variational: return "variational";
    case Regime::Monotone: return "monotone";
    case Regime::Quasilinear: return "quasilinear";
  }
  return "?";
}

const char *to_string(Regularizer r) { return r == Regularizer::Gradient ? "gradient" : "l2"; }

namespace {

const Mesh &mesh_of(const StateProblem &s) {
  return std::visit([](const auto &p) -> const Mesh & { return p.mesh; }, s);
}

}  // namespace

ControlProblem ControlProblem::create(StateProblem state, CostIntegrand cost,
                                      std::optional<ScalarField> target, Regularizer reg,
                                      double M) {
  if (!(M > 0.0)) throw std::invalid_argument("control problem: M must be positive");
  if (!cost) throw std::invalid_argument("control problem: cost integrand missing");
  const Mesh mesh = mesh_of(state);
  ScalarField yd = target ? *target : ScalarField::zeros(mesh);
  require_same_mesh(mesh, yd.mesh, "control target");
  if (yd.location != Location::Node) throw std::invalid_argument("control target must be nodal");
  return ControlProblem{mesh, std::move(state), std::move(cost), std::move(yd), reg, M};
}

const QuasilinearStateProblem &ControlProblem::quasilinear() const {
  if (const auto *q = std::get_if<QuasilinearStateProblem>(&state)) return *q;
  throw std::invalid_argument("control problem is not in the quasilinear regime");
}

ScalarField solve_state_for(const ControlProblem &cp, const ScalarField &u,
                            const std::optional<ScalarField> &warm, const StateTolerances &tol) {
  require_same_mesh(cp.mesh, u.mesh, "state solve");
  switch (cp.regime()) {
    case Regime::Variational: {
      VariationalOptions o;
      o.tolerance = tol.variational;
      o.initial = warm;
      return solve_state(std::get<VariationalStateProblem>(cp.state), u, o).first;
    }
    case Regime::Monotone: {
      MonotoneOptions o;
      o.tolerance = tol.monotone;
      o.initial = warm;
      return solve_monotone(std::get<MonotoneStateProblem>(cp.state), u, o).first;
    }
    case Regime::Quasilinear: {
      QuasilinearOptions o;
      o.tolerance = tol.quasilinear;
      o.initial = warm;
      return solve_quasilinear(std::get<QuasilinearStateProblem>(cp.state), u, o).first;
    }
  }
  throw std::logic_error("unknown regime");
}

double tracking_term(const ControlProblem &cp, const ScalarField &y) {
  double s = 0.0;
  for (std::size_t k = 0; k < y.values.size(); ++k)
    s += cp.mesh.node_weight(k) * cp.cost(y.values[k], cp.target.values[k]);
  return s;
}

double regularizer_term(const ControlProblem &cp, const ScalarField &u) {
  double s = 0.0;
  if (cp.regularizer == Regularizer::Gradient) {
    for (const Vec2 &g : gradient(u).values) s += norm2(g);
    s *= cp.mesh.cell_volume();
  } else {
    for (std::size_t k = 0; k < u.values.size(); ++k)
      s += cp.mesh.node_weight(k) * u.values[k] * u.values[k];
  }
  return 0.5 * cp.tychonov * s;
}

namespace {

CostFunction classical_cost(const ControlProblem &cp, const StateTolerances &tol) {
  return [&cp, tol](const ScalarField &u, const std::optional<ScalarField> &warm) {
    ScalarField y = solve_state_for(cp, u, warm, tol);
    const double c = tracking_term(cp, y) + regularizer_term(cp, u);
    return CostSample{c, std::move(y)};
  };
}

double euclid(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double evaluate_cost(const ControlProblem &cp, const ScalarField &u) {
  return classical_cost(cp, StateTolerances{})(u, std::nullopt).cost;
}

std::vector<double> fd_gradient(const CostFunction &cost, const ScalarField &u,
                                const CostSample &base, Difference scheme) {
  const double step = 1e-5 * (1.0 + u.max_abs());
  std::vector<double> g(u.values.size());
  ScalarField v = u;
  for (std::size_t k = 0; k < g.size(); ++k) {
    v.values[k] = u.values[k] + step;
    const double up = cost(v, base.state).cost;
    if (scheme == Difference::Forward) {
      g[k] = (up - base.cost) / step;
    } else {
      v.values[k] = u.values[k] - step;
      g[k] = (up - cost(v, base.state).cost) / (2.0 * step);
    }
    v.values[k] = u.values[k];
  }
  return g;
}

std::vector<double> cost_gradient(const ControlProblem &cp, const ScalarField &u,
                                  Difference scheme) {
  const CostFunction cost = classical_cost(cp, StateTolerances{});
  return fd_gradient(cost, u, cost(u, std::nullopt), scheme);
}

std::pair<ScalarField, SolveReport> optimize_control(const ControlProblem &cp,
                                                     const ScalarField &u0,
                                                     const ControlOptions &opts) {
  require_same_mesh(cp.mesh, u0.mesh, "optimize_control");
  return minimize_fd(classical_cost(cp, opts.state), u0, opts);
}

std::pair<ScalarField, SolveReport> minimize_fd(const CostFunction &cost, const ScalarField &u0,
                                                const ControlOptions &opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  ScalarField u = u0;
  CostSample cur = cost(u, std::nullopt);
  rep.trace.push_back(cur.cost);
  std::vector<double> g = fd_gradient(cost, u, cur, Difference::Forward);
  double gnorm = euclid(g);
  double gmax = 0.0;
  for (double x : g) gmax = std::max(gmax, std::abs(x));
  double alpha = gmax > 0.0 ? std::min(1.0, 0.1 * (1.0 + u.max_abs()) / gmax) : 1.0;
  int stalls = 0;
  bool ok = true;
  std::size_t it = 0;

  while (gnorm > opts.stationarity && it < opts.max_iterations) {
    bool accepted = false;
    CostSample trial;
    ScalarField v = u;
    double a = alpha;
    for (std::size_t ls = 0; ls < opts.max_line_search; ++ls, a *= 0.5) {
      for (std::size_t k = 0; k < v.values.size(); ++k) v.values[k] = u.values[k] - a * g[k];
      try {
        trial = cost(v, cur.state);
      } catch (const NonConvergenceError &) {
        continue;
      }
      if (trial.cost <= cur.cost - 1e-4 * a * gnorm * gnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      ok = false;
      rep.warnings.push_back("line search failed; returning best iterate");
      break;
    }
    const double decrease = cur.cost - trial.cost;
    std::vector<double> gn = fd_gradient(cost, v, trial, Difference::Forward);
    // Barzilai-Borwein step from the accepted move.
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double s = v.values[k] - u.values[k];
      ss += s * s;
      sy += s * (gn[k] - g[k]);
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : std::min(4.0 * a, 1e12);
    u = std::move(v);
    cur = std::move(trial);
    g = std::move(gn);
    gnorm = euclid(g);
    rep.trace.push_back(cur.cost);
    rep.increments.push_back(std::sqrt(ss));
    ++it;
    stalls = decrease <= opts.stall * (1.0 + std::abs(cur.cost)) ? stalls + 1 : 0;
    if (stalls >= 3) {
      rep.warnings.push_back("cost stalled at roundoff level");
      break;
    }
  }
  if (it >= opts.max_iterations && gnorm > opts.stationarity) {
    ok = false;
    rep.warnings.push_back("iteration cap reached");
  }
  rep.iterations = it;
  rep.converged = ok;
  rep.residual = gnorm;
  rep.cost = cur.cost;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(u), rep};
}

namespace {

// Three-point Gauss rule on [0, 1].
constexpr double kGaussX[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

double integrate_cost(const ControlProblem &cp, const Laminate &y, const Laminate &yd) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.pieces(); ++i) {
    const double a = y.x[i], b = y.x[i + 1];
    for (int q = 0; q < 3; ++q) {
      const double t = a + kGaussX[q] * (b - a);
      s += kGaussW[q] * (b - a) * cp.cost(y(t), yd(t));
    }
  }
  return s;
}

double laminate_regularizer(const ControlProblem &cp, const Laminate &u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.pieces(); ++i) {
    const double len = u.x[i + 1] - u.x[i];
    if (cp.regularizer == Regularizer::Gradient) {
      s += len * u.slope(i) * u.slope(i);
    } else {
      const double p = u.value[i], q = u.value[i + 1];
      s += len * (p * p + p * q + q * q) / 3.0;
    }
  }
  return 0.5 * cp.tychonov * s;
}

double refined_classical_cost(const ControlProblem &cp, const Laminate &u, const Laminate &yd,
                              int j) {
  const std::size_t n = std::min<std::size_t>(cp.mesh.cells_per_axis() * 2 * j, 4096);
  const Mesh fine = build_mesh(1, n);
  const QuasilinearStateProblem q =
      QuasilinearStateProblem::create(fine, cp.quasilinear().coeffs, false);
  const ControlProblem fp =
      ControlProblem::create(q, cp.cost, yd.sample(fine), cp.regularizer, cp.tychonov);
  return evaluate_cost(fp, u.sample(fine));
}

}  // namespace

std::vector<SequencePoint> minimizing_sequence_demo(const ControlProblem &cp,
                                                    const YoungMeasureField &mu, double offset,
                                                    const YoungMeasureField &nu,
                                                    const std::vector<int> &j_list,
                                                    bool classical) {
  if (cp.mesh.dimension() != 1) throw std::invalid_argument("minimizing sequence: 1D only");
  require_same_mesh(cp.mesh, mu.mesh(), "minimizing sequence");
  require_same_mesh(cp.mesh, nu.mesh(), "minimizing sequence");
  Laminate yd;
  for (std::size_t k = 0; k < cp.target.values.size(); ++k) {
    yd.x.push_back(cp.mesh.node_coords(k).x);
    yd.value.push_back(cp.target.values[k]);
  }
  std::vector<SequencePoint> out;
  for (int j : j_list) {
    const Laminate uj = realize_sequence(mu, j, offset);
    const Laminate yj = realize_sequence(nu, j, 0.0);
    SequencePoint p;
    p.j = j;
    p.cost = integrate_cost(cp, yj, yd) + laminate_regularizer(cp, uj);
    if (classical && cp.regime() == Regime::Quasilinear)
      p.classical_cost = refined_classical_cost(cp, uj, yd, j);
    out.push_back(p);
  }
  return out;
}

}  // namespace qlc
