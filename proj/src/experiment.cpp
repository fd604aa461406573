#include "qlcontrol/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

namespace qlc {

using json = nlohmann::ordered_json;

namespace {

const CoefficientSet &coefficients_of(const ControlProblem &cp) {
  return std::visit([](const auto &p) -> const CoefficientSet & { return p.coeffs; }, cp.state);
}

json to_json(const std::vector<double> &v) { return json(v); }

json to_json(const HypothesisReport &r) {
  return json{{"hypothesis", r.hypothesis},
              {"samples", r.samples},
              {"worst_margin", r.worst_margin},
              {"pass", r.pass}};
}

json to_json(const Certificate &c) {
  return json{{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass},
              {"note", c.note}};
}

json to_json(const SolveReport &r) {
  return json{{"iterations", r.iterations}, {"converged", r.converged}, {"residual", r.residual},
              {"cost", r.cost},             {"trace", to_json(r.trace)},
              {"increments", to_json(r.increments)}, {"warnings", r.warnings},
              {"wall_time_s", r.wall_time_s}};
}

json to_json(const RelaxationReport &r) {
  json certs = json::array();
  for (const auto &c : r.certificates) certs.push_back(to_json(c));
  json seq = json::array();
  for (const auto &p : r.sequence) {
    json e{{"j", p.j}, {"cost", p.cost}};
    if (p.classical_cost) e["classical_cost"] = *p.classical_cost;
    seq.push_back(e);
  }
  json j{{"instance", r.instance},
         {"classical_best", r.classical_best},
         {"relaxed", r.relaxed},
         {"gap", r.gap},
         {"designed_gap", r.designed_gap ? json(*r.designed_gap) : json(nullptr)},
         {"dirac_residual", r.dirac_residual},
         {"consistency", r.consistency},
         {"normalization_error", r.normalization_error},
         {"stationarity", r.stationarity},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"feasible", r.feasible},
         {"trace", to_json(r.trace)},
         {"sequence", seq},
         {"certificates", certs},
         {"warnings", r.warnings},
         {"notes", r.notes},
         {"wall_time_s", r.wall_time_s}};
  return j;
}

Certificate from_hypothesis(const HypothesisReport &r) {
  return Certificate{r.hypothesis, r.worst_margin, 0.0, r.pass,
                     std::to_string(r.samples) + " samples"};
}

std::string csv_of(const ScalarField &f) {
  std::ostringstream os;
  write_field_csv(os, f);
  return os.str();
}

std::string csv_of(const YoungMeasureField &m) {
  std::ostringstream os;
  write_measure_csv(os, m);
  return os.str();
}

ScalarField random_start(const Mesh &m, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const double c0 = amp(rng), c1 = amp(rng), c2 = amp(rng), c3 = amp(rng);
  const double pi = std::numbers::pi;
  return ScalarField::from_function(m, [=](const Vec2 &x) {
    return c0 + c1 * std::cos(pi * x.x) + c2 * std::cos(2 * pi * x.x) + c3 * std::cos(pi * x.y);
  });
}

struct Run {
  json result = json::object();
  std::vector<Certificate> certificates;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> summary;
};

void run_state(const ExperimentConfig &c, const Instance &inst, Run &run) {
  const ControlProblem &cp = inst.problem;
  const ScalarField u = ScalarField::constant(cp.mesh, c.solver.control_value);
  SolveReport rep;
  ScalarField y;
  switch (cp.regime()) {
    case Regime::Quasilinear: {
      const auto &q = std::get<QuasilinearStateProblem>(cp.state);
      QuasilinearOptions o;
      o.tolerance = c.solver.tolerance;
      o.max_iterations = c.solver.max_iterations;
      std::tie(y, rep) = solve_quasilinear(q, u, o);
      const AprioriBound ab = apriori_gradient_bound(q, u, y);
      run.result["apriori"] = json{{"bound", ab.bound},
                                   {"gradient", ab.gradient},
                                   {"ratio", ab.ratio},
                                   {"holds", ab.holds}};
      run.certificates.push_back({"apriori-bound", ab.gradient, ab.bound, ab.holds,
                                  "||grad y|| <= P ||f|| / (1 - C^2/4b)"});
      const auto &inc = rep.increments;
      if (inc.size() >= 3)
        run.result["contraction_ratio"] = inc[inc.size() - 2] / inc[inc.size() - 3];
      break;
    }
    case Regime::Monotone: {
      const auto &m = std::get<MonotoneStateProblem>(cp.state);
      MonotoneOptions o;
      o.tolerance = c.solver.tolerance;
      o.max_iterations = c.solver.max_iterations;
      std::tie(y, rep) = solve_monotone(m, u, o);
      const double cc = m.coeffs.k.monotonicity, C = m.coeffs.k.growth;
      run.result["contraction_bound"] = monotone_contraction_bound(cc / (C * C), cc, C);
      run.certificates.push_back(from_hypothesis(verify_limit_identity(m, y, u)));
      break;
    }
    case Regime::Variational: {
      const auto &v = std::get<VariationalStateProblem>(cp.state);
      VariationalOptions o;
      o.tolerance = c.solver.tolerance;
      o.max_iterations = c.solver.max_iterations;
      std::tie(y, rep) = solve_state(v, u, o);
      run.certificates.push_back(
          from_hypothesis(verify_minimality(v, y, u, c.solver.trials, c.seed)));
      break;
    }
  }
  run.result["solve"] = to_json(rep);
  run.result["cost"] = tracking_term(cp, y) + regularizer_term(cp, u);
  run.result["state_l2"] = l2_norm(y);
  run.result["state_h1"] = h1_seminorm(y);
  run.warnings.insert(run.warnings.end(), rep.warnings.begin(), rep.warnings.end());
  run.files.emplace_back("state.csv", csv_of(y));
  run.files.emplace_back("control.csv", csv_of(u));
  std::ostringstream s;
  s << "state solve: " << rep.iterations << " iterations, residual " << rep.residual;
  run.summary.push_back(s.str());
}

void run_control(const ExperimentConfig &c, const Instance &inst, Run &run) {
  const ControlProblem &cp = inst.problem;
  ControlOptions o;
  o.max_iterations = c.solver.outer_iterations;
  o.max_line_search = c.solver.line_search;
  std::mt19937_64 rng(c.seed);
  json runs = json::array();
  double best = INFINITY, worst = -INFINITY;
  ScalarField best_u;
  for (std::size_t s = 0; s < std::max<std::size_t>(1, c.solver.starts); ++s) {
    const ScalarField u0 = s == 0 ? ScalarField::zeros(cp.mesh) : random_start(cp.mesh, rng);
    auto [u, rep] = optimize_control(cp, u0, o);
    runs.push_back(json{{"start", s}, {"report", to_json(rep)}});
    for (const auto &w : rep.warnings) run.warnings.push_back("start " + std::to_string(s) + ": " + w);
    if (rep.cost < best) {
      best = rep.cost;
      best_u = u;
    }
    worst = std::max(worst, rep.cost);
  }
  run.result["runs"] = runs;
  run.result["best_cost"] = best;
  run.result["spread"] = worst - best;
  run.files.emplace_back("control.csv", csv_of(best_u));
  run.files.emplace_back("state.csv", csv_of(solve_state_for(cp, best_u)));
  std::ostringstream s;
  s << "best cost " << best << " over " << runs.size() << " start(s), spread " << worst - best;
  run.summary.push_back(s.str());
}

void run_relax(const ExperimentConfig &c, const Instance &inst, Run &run, bool demo) {
  if (!inst.relaxable())
    throw HypothesisError("the measure-valued relaxation needs a quasilinear instance");
  const RelaxedProblem rp = inst.relaxed();
  GapOptions g;
  g.samples = c.solver.samples;
  g.seed = c.seed;
  g.sequence = demo;
  g.j_list = c.solver.j_list;
  g.control.max_iterations = c.solver.outer_iterations;
  g.control.max_line_search = c.solver.line_search;
  auto [point, rep] = certify_gap(rp, g);
  run.result["relaxation"] = to_json(rep);
  run.certificates.insert(run.certificates.end(), rep.certificates.begin(), rep.certificates.end());
  run.warnings.insert(run.warnings.end(), rep.warnings.begin(), rep.warnings.end());
  if (demo) {
    if (!inst.designed_gap) throw ConfigError("gap-demo needs an instance with a designed margin");
    const double bound = rep.classical_best - *inst.designed_gap + 1e-3;
    run.result["gap_demo"] = json{{"relaxed", rep.relaxed},
                                  {"classical_best", rep.classical_best},
                                  {"designed_gap", *inst.designed_gap},
                                  {"bound", bound},
                                  {"holds", rep.relaxed <= bound}};
    std::ostringstream seq;
    seq << "j,cost\n";
    seq.precision(17);
    for (const auto &p : rep.sequence) seq << p.j << ',' << p.cost << '\n';
    run.files.emplace_back("sequence.csv", seq.str());
  }
  run.files.emplace_back("mu.csv", csv_of(point.mu));
  run.files.emplace_back("nu.csv", csv_of(point.nu));
  run.files.emplace_back("control.csv", csv_of(recover_control(point.mu, point.gauge)));
  run.files.emplace_back("state.csv", csv_of(point.y));
  std::ostringstream s;
  s.precision(10);
  s << "classical best " << rep.classical_best << ", relaxed " << rep.relaxed << ", gap "
    << rep.gap;
  if (rep.designed_gap) s << ", designed margin " << *rep.designed_gap;
  run.summary.push_back(s.str());
}

void run_hypotheses(const ExperimentConfig &c, const Instance &inst, Run &run) {
  const ControlProblem &cp = inst.problem;
  const CoefficientSet &cs = coefficients_of(cp);
  const ScalarField u = ScalarField::constant(cp.mesh, c.solver.control_value);
  json reports = json::array();
  auto add = [&](const HypothesisReport &r) {
    reports.push_back(to_json(r));
    run.certificates.push_back(from_hypothesis(r));
  };
  switch (cp.regime()) {
    case Regime::Monotone: {
      add(check_monotonicity(cs, kDefaultSamples, kDefaultRadius, c.seed));
      add(check_growth(cs, kDefaultSamples, kDefaultRadius, c.seed));
      const auto &m = std::get<MonotoneStateProblem>(cp.state);
      add(verify_limit_identity(m, solve_monotone(m, u).first, u));
      break;
    }
    case Regime::Quasilinear: {
      const auto &q = std::get<QuasilinearStateProblem>(cp.state);
      add(check_lipschitz(cs, kDefaultSamples, kDefaultRadius, c.seed));
      CoefficientSet lower_only;
      lower_only.dimension = cs.dimension;
      lower_only.lower = cs.lower;
      lower_only.k = cs.k;
      add(check_growth(lower_only, kDefaultSamples, kDefaultRadius, c.seed));
      HypothesisReport thr;
      thr.hypothesis = "uniqueness-threshold";
      thr.samples = 1;
      thr.worst_margin = q.b() - uniqueness_threshold(cs.k.lipschitz);
      thr.pass = thr.worst_margin > 0.0;
      add(thr);
      add(verify_uniqueness(q, u, std::min<std::size_t>(5, c.solver.trials), c.seed));
      const AprioriBound ab = apriori_gradient_bound(q, u);
      HypothesisReport ar;
      ar.hypothesis = "apriori-bound";
      ar.samples = 1;
      ar.worst_margin = ab.bound - ab.gradient;
      ar.pass = ab.holds;
      add(ar);
      break;
    }
    case Regime::Variational: {
      add(check_w_growth(cs, kDefaultSamples, kDefaultRadius, c.seed));
      add(check_w_convexity(cs, kDefaultSamples, kDefaultRadius, c.seed));
      const auto &v = std::get<VariationalStateProblem>(cp.state);
      add(verify_minimality(v, solve_state(v, u).first, u, c.solver.trials, c.seed));
      break;
    }
  }
  run.result["hypotheses"] = reports;
  std::size_t passed = 0;
  for (const auto &r : run.certificates) passed += r.pass;
  run.summary.push_back(std::to_string(passed) + "/" + std::to_string(run.certificates.size()) +
                        " hypotheses hold");
}

void strip(json &j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto &[k, v] : j.items()) strip(v);
  } else if (j.is_array()) {
    for (auto &v : j) strip(v);
  }
}

}  // namespace

std::string strip_wall_time(const std::string &report_json) {
  json j = json::parse(report_json);
  strip(j);
  return j.dump(2);
}

ExperimentOutcome run_experiment(const ExperimentConfig &config) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutcome out;
  Run run;
  json report;
  report["kind"] = to_string(config.kind);
  report["instance"] = config.instance;
  report["seed"] = config.seed;
  report["config"] = serialize_config(config);
  try {
    const Instance inst = build_instance(config.spec);
    const CoefficientSet &cs = coefficients_of(inst.problem);
    report["constants"] = json{{"regime", to_string(inst.problem.regime())},
                               {"dimension", inst.spec.dimension},
                               {"cells", inst.spec.cells},
                               {"L", cs.k.lipschitz},
                               {"c", cs.k.monotonicity},
                               {"C", cs.k.growth},
                               {"b", cs.k.zero_order},
                               {"threshold", uniqueness_threshold(cs.k.lipschitz)},
                               {"M", inst.problem.tychonov},
                               {"designed_gap", inst.designed_gap ? json(*inst.designed_gap)
                                                                  : json(nullptr)}};
    run.warnings = inst.warnings;
    switch (config.kind) {
      case ExperimentKind::State: run_state(config, inst, run); break;
      case ExperimentKind::Control: run_control(config, inst, run); break;
      case ExperimentKind::Relax: run_relax(config, inst, run, false); break;
      case ExperimentKind::GapDemo: run_relax(config, inst, run, true); break;
      case ExperimentKind::VerifyHypotheses: run_hypotheses(config, inst, run); break;
    }
  } catch (const HypothesisError &e) {
    out.exit_code = 1;
    out.error = e.what();
  } catch (const ConfigError &e) {
    out.exit_code = 1;
    out.error = e.what();
  } catch (const std::invalid_argument &e) {
    out.exit_code = 1;
    out.error = e.what();
  } catch (const std::exception &e) {
    // Solver non-convergence and infeasible measures.
    out.exit_code = 2;
    out.error = e.what();
  }

  bool failed = out.exit_code == 2;
  json certs = json::array();
  for (const auto &c : run.certificates) {
    certs.push_back(to_json(c));
    failed = failed || !c.pass;
  }
  if (out.exit_code == 0 && failed) out.exit_code = 2;
  if (config.kind == ExperimentKind::GapDemo && run.result.contains("gap_demo") &&
      !run.result["gap_demo"]["holds"].get<bool>())
    out.exit_code = 2;
  report["status"] = out.exit_code == 0 ? "ok" : out.exit_code == 1 ? "ERROR" : "FAILED";
  if (!out.error.empty()) report["error"] = out.error;
  report["certificates"] = certs;
  report["warnings"] = run.warnings;
  report["result"] = run.result;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["wall_time_s"] = wall;
  out.report_json = report.dump(2) + "\n";

  std::ostringstream s;
  s << to_string(config.kind) << " on " << config.instance << " (seed " << config.seed << "): "
    << report["status"].get<std::string>() << '\n';
  if (!out.error.empty()) s << "error: " << out.error << '\n';
  for (const auto &line : run.summary) s << line << '\n';
  for (const auto &c : run.certificates)
    s << (c.pass ? "PASS " : "FAIL ") << c.name << " (value " << c.value << ", bound " << c.bound
      << ")\n";
  for (const auto &w : run.warnings) s << "warning: " << w << '\n';
  out.summary = s.str();
  out.files = std::move(run.files);
  return out;
}

void write_outcome(const ExperimentConfig &config, const ExperimentOutcome &outcome) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out);
  fs::create_directories(dir);
  auto write = [&](const std::string &name, const std::string &text) {
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    f << text;
  };
  write("report.json", outcome.report_json);
  write("summary.txt", outcome.summary);
  for (const auto &[name, text] : outcome.files) write(name, text);
}

}  // namespace qlc
