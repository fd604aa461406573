#include "qlcontrol/instances.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qlc {

namespace {

[[noreturn]] void unknown(const std::string &what, const std::string &value) {
  throw std::invalid_argument("unknown " + what + " '" + value + "'");
}

SourceMap make_source(const InstanceSpec &s, double &bound) {
  if (s.source == "identity") {
    bound = 0.0;
    return builtin::source_identity();
  }
  if (s.source == "tanh") {
    bound = 1.0;
    return builtin::source_tanh();
  }
  if (s.source == "clamp") {
    bound = std::abs(s.source_scale);
    return builtin::source_clamp(s.source_scale);
  }
  unknown("source", s.source);
}

CostIntegrand make_cost(const InstanceSpec &s) {
  if (s.cost == "tracking") return builtin::tracking_clamped(s.cap);
  if (s.cost == "negative-capped") return builtin::negative_capped(s.cap);
  if (s.cost == "zero") return builtin::zero_cost();
  unknown("cost", s.cost);
}

ScalarField make_target(const InstanceSpec &s, const Mesh &m) {
  if (s.target == "zero") return ScalarField::zeros(m);
  if (s.target == "constant") return ScalarField::constant(m, s.target_value);
  if (s.target == "bump") {
    const double v = s.target_value;
    const double pi = std::numbers::pi;
    return ScalarField::from_function(m, [v, pi, dim = m.dimension()](const Vec2 &x) {
      return v * std::sin(pi * x.x) * (dim == 2 ? std::sin(pi * x.y) : 1.0);
    });
  }
  if (s.target == "helmholtz-one") {
    ScalarField y = helmholtz_solve(1.0, ScalarField::constant(m, 1.0));
    for (double &v : y.values) v *= s.target_value;
    return y;
  }
  unknown("target", s.target);
}

StateProblem make_state(const InstanceSpec &s, const Mesh &m, bool check,
                        std::vector<std::string> &warnings) {
  const Vec2 e{1.0, 0.0};
  if (s.regime == "quasilinear") {
    CoefficientSet cs;
    cs.dimension = s.dimension;
    cs.name = s.name;
    double L = 0.0;
    if (s.lower == "none") {
      cs.lower = [](const Vec2 &) { return 0.0; };
    } else if (s.lower == "sin") {
      cs.lower = builtin::sin_gradient(s.kappa, e);
      L = std::abs(s.kappa);
    } else if (s.lower == "clamped") {
      cs.lower = builtin::clamped_linear(s.kappa, e);
      L = std::abs(s.kappa);
    } else if (s.lower == "cosine-wells") {
      cs.lower = builtin::cosine_wells(s.kappa, s.omega, e);
      L = std::abs(s.kappa * s.omega);
    } else {
      unknown("lower-order term", s.lower);
    }
    cs.source = make_source(s, cs.source_bound);
    cs.k.lipschitz = L;
    cs.k.growth = L;
    cs.k.tychonov = s.tychonov;
    cs.k.zero_order = s.zero_order.value_or(default_zero_order(L));
    cs.description.emplace_back("a", s.lower);
    cs.description.emplace_back("f", s.source);
    QuasilinearStateProblem q = QuasilinearStateProblem::create(m, std::move(cs), check);
    warnings.insert(warnings.end(), q.warnings.begin(), q.warnings.end());
    return q;
  }
  if (s.regime == "monotone") {
    FluxMap g;
    double lg = 0.0;
    if (s.flux == "identity") {
      g = nullptr;
    } else if (s.flux == "perturbed-sin") {
      g = builtin::sin_per_component(s.lg);
      lg = std::abs(s.lg);
    } else {
      unknown("flux", s.flux);
    }
    CoefficientSet cs = make_perturbed_linear(s.a0, g, lg, s.dimension);
    cs.name = s.name;
    cs.source = make_source(s, cs.source_bound);
    cs.k.tychonov = s.tychonov;
    return MonotoneStateProblem::create(m, std::move(cs), check);
  }
  if (s.regime == "variational") {
    CoefficientSet cs;
    cs.dimension = s.dimension;
    cs.name = s.name;
    cs.k.monotonicity = 0.5;
    if (s.energy == "half-square") {
      cs.energy = builtin::half_square();
      cs.energy_grad = [](const Vec2 &y, double) { return y; };
      cs.energy_quadratic = 1.0;
      cs.k.growth = 0.5;
    } else if (s.energy == "nonconvex-u") {
      cs.energy = builtin::half_square_nonconvex_u(s.delta);
      cs.energy_grad = [](const Vec2 &y, double) { return y; };
      cs.energy_quadratic = 1.0;
      cs.k.growth = 0.5 + std::abs(s.delta);
    } else if (s.energy == "clamped-quartic") {
      cs.energy = builtin::clamped_quartic(s.radius);
      cs.energy_grad = builtin::clamped_quartic_gradient(s.radius);
      cs.k.growth = 0.5 + 1.5 * s.radius * s.radius;
    } else {
      unknown("energy", s.energy);
    }
    cs.coupling = [](double y) { return y; };
    cs.coupling_slope = 1.0;
    cs.k.tychonov = s.tychonov;
    cs.description.emplace_back("W", s.energy);
    const EnergyForm form = EnergyForm::AffineInU;
    return VariationalStateProblem::create(m, std::move(cs),
                                           ScalarField::constant(m, s.source_value), form, check);
  }
  unknown("regime", s.regime);
}

}  // namespace

RelaxedProblem Instance::relaxed() const {
  return RelaxedProblem::create(problem, static_cast<std::size_t>(spec.state_atoms),
                                static_cast<std::size_t>(spec.control_atoms), designed_gap);
}

double cosine_well_gap(const ControlProblem &cp) {
  const QuasilinearStateProblem &q = cp.quasilinear();
  const ScalarField one = ScalarField::constant(cp.mesh, 1.0);
  const double classical = evaluate_cost(cp, one);
  // Every gradient value lies between two neighbouring wells of
  // 1 - cos(omega s), so a two-atom measure reaches abar = 0 at any barycenter.
  const ScalarField y = helmholtz_solve(q.b(), q.source_of(one));
  return classical - (tracking_term(cp, y) + regularizer_term(cp, one));
}

Instance build_instance(const InstanceSpec &spec, bool check) {
  if (spec.dimension != 1 && spec.dimension != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  if (spec.state_atoms < 1 || spec.control_atoms < 1)
    throw std::invalid_argument("atom budgets must be positive");
  const Mesh m = build_mesh(spec.dimension, static_cast<std::size_t>(spec.cells));
  std::vector<std::string> warnings;
  StateProblem state = make_state(spec, m, check, warnings);
  const Regularizer reg = spec.regularizer == "gradient" ? Regularizer::Gradient
                          : spec.regularizer == "l2"     ? Regularizer::L2
                                                         : (unknown("regularizer", spec.regularizer),
                                                            Regularizer::Gradient);
  Instance inst{spec,
                ControlProblem::create(std::move(state), make_cost(spec), make_target(spec, m),
                                       reg, spec.tychonov),
                std::nullopt, std::move(warnings)};
  if (spec.regime == "quasilinear" && spec.lower == "cosine-wells" &&
      spec.cost == "negative-capped" && spec.source == "clamp" && spec.dimension == 1)
    inst.designed_gap = cosine_well_gap(inst.problem);
  return inst;
}

std::vector<std::string> builtin_names() {
  return {"linear-tracking-1d", "sin-gradient-1d",    "gap-family-1d",      "tiny-tracking-1d",
          "sin-gradient-2d",    "clamped-quartic-1d", "perturbed-linear-1d", "quadratic-1d"};
}

InstanceSpec builtin_spec(const std::string &name) {
  InstanceSpec s;
  s.name = name;
  if (name == "linear-tracking-1d") {
    s.lower = "none";
    s.zero_order = 1.0;
    s.target = "bump";
    s.target_value = 0.1;
    s.cells = 32;
    s.description = "a = 0, b = 1, f(u) = u, tracking of 0.1 sin(pi x)";
  } else if (name == "sin-gradient-1d") {
    s.lower = "sin";
    s.kappa = 1.0;
    s.zero_order = 1.0;
    s.source = "tanh";
    s.target = "bump";
    s.target_value = 0.05;
    s.cells = 64;
    s.description = "a(p) = sin(p), L = 1, b = 1, f(u) = tanh(u)";
  } else if (name == "gap-family-1d") {
    s.lower = "cosine-wells";
    s.kappa = 0.1;
    s.omega = 4.0 * std::numbers::pi;
    s.zero_order = 1.0;
    s.source = "clamp";
    s.cost = "negative-capped";
    s.cap = 1.0;
    s.cells = 128;
    s.state_atoms = 2;
    s.control_atoms = 2;
    s.description = "a(p) = 0.1 (1 - cos(4 pi p)), f = clamp(u), F(y) = -min(y, 1)";
  } else if (name == "tiny-tracking-1d") {
    s.lower = "sin";
    s.kappa = 0.5;
    s.zero_order = 1.0;
    s.target = "bump";
    s.target_value = 0.08;
    s.tychonov = 1e-2;
    s.cells = 6;
    s.state_atoms = 2;
    s.control_atoms = 2;
    s.description = "six cells, a(p) = 0.5 sin(p), f(u) = u, for lattice enumeration";
  } else if (name == "sin-gradient-2d") {
    s.dimension = 2;
    s.lower = "sin";
    s.kappa = 1.0;
    s.zero_order = 1.0;
    s.source = "tanh";
    s.target = "bump";
    s.target_value = 0.05;
    s.cells = 8;
    s.description = "2D, a(p) = sin(p_x), b = 1, f(u) = tanh(u)";
  } else if (name == "clamped-quartic-1d") {
    s.regime = "variational";
    s.energy = "clamped-quartic";
    s.radius = 10.0;
    s.source_value = -1.0;
    s.target = "bump";
    s.target_value = 0.1;
    s.tychonov = 1e-2;
    s.cells = 16;
    s.description = "I = int 1/2|y'|^2 + phi_R(|y'|) + (f + u) y with a clamped quartic phi_R";
  } else if (name == "perturbed-linear-1d") {
    s.regime = "monotone";
    s.flux = "perturbed-sin";
    s.a0 = 1.0;
    s.lg = 0.5;
    s.target = "bump";
    s.target_value = 0.05;
    s.cells = 32;
    s.description = "A(p) = p + 0.5 sin(p), f(u) = u";
  } else if (name == "quadratic-1d") {
    s.regime = "variational";
    s.energy = "half-square";
    s.source_value = 0.0;
    s.target = "bump";
    s.target_value = 0.1;
    s.cells = 16;
    s.description = "W = 1/2|y'|^2, w(y) = y, quadratic tracking: a quadratic program";
  } else {
    unknown("built-in instance", name);
  }
  return s;
}

std::vector<CatalogRow> list_builtin(const std::string &filter) {
  std::vector<CatalogRow> rows;
  for (const std::string &name : builtin_names()) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    const Instance inst = build_instance(builtin_spec(name), false);
    CatalogRow r;
    r.name = name;
    r.regime = to_string(inst.problem.regime());
    r.dimension = inst.spec.dimension;
    r.cells = inst.spec.cells;
    const CoefficientSet &cs = std::visit(
        [](const auto &p) -> const CoefficientSet & { return p.coeffs; }, inst.problem.state);
    r.lipschitz = cs.k.lipschitz;
    r.monotonicity = cs.k.monotonicity;
    r.growth = cs.k.growth;
    r.zero_order = cs.k.zero_order;
    r.threshold = uniqueness_threshold(cs.k.lipschitz);
    r.tychonov = inst.problem.tychonov;
    r.designed_gap = inst.designed_gap;
    r.description = inst.spec.description;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_catalog(const std::vector<CatalogRow> &rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-12s %3s %5s %8s %8s %8s %6s %8s %8s %10s\n", "name",
                "regime", "dim", "cells", "L", "c", "C", "b", "L^2/4", "M", "gap");
  os << buf;
  for (const CatalogRow &r : rows) {
    char gap[32] = "-";
    if (r.designed_gap) std::snprintf(gap, sizeof gap, "%.6f", *r.designed_gap);
    std::snprintf(buf, sizeof buf, "%-20s %-12s %3d %5d %8.4g %8.4g %8.4g %6.3g %8.4g %8.2g %10s\n",
                  r.name.c_str(), r.regime.c_str(), r.dimension, r.cells, r.lipschitz,
                  r.monotonicity, r.growth, r.zero_order, r.threshold, r.tychonov, gap);
    os << buf;
  }
  return os.str();
}

}  // namespace qlc
