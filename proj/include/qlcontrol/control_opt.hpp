#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qlcontrol/coefficients.hpp"
#include "qlcontrol/grid.hpp"
#include "qlcontrol/report.hpp"
#include "qlcontrol/state_monotone.hpp"
#include "qlcontrol/state_quasilinear.hpp"
#include "qlcontrol/state_variational.hpp"
#include "qlcontrol/young_measure.hpp"

namespace qlc {

enum class Regime { Variational, Monotone, Quasilinear };
enum class Regularizer { Gradient, L2 };

const char *to_string(Regime r);
const char *to_string(Regularizer r);

using StateProblem =
    std::variant<VariationalStateProblem, MonotoneStateProblem, QuasilinearStateProblem>;

/// Minimize sum_nodes w_i F(y_u, y_d) + (M/2) R(u) over nodal controls u on
/// the whole mesh (boundary values free).
struct ControlProblem {
  Mesh mesh;
  StateProblem state;
  CostIntegrand cost;
  ScalarField target;  ///< y_d, nodal; zero when the cost ignores it
  Regularizer regularizer = Regularizer::Gradient;
  double tychonov = 1.0;  ///< M

  /// Validates M > 0 and mesh agreement.
  static ControlProblem create(StateProblem state, CostIntegrand cost,
                               std::optional<ScalarField> target, Regularizer reg, double M);

  Regime regime() const { return static_cast<Regime>(state.index()); }
  const QuasilinearStateProblem &quasilinear() const;
};

/// Tolerances used for the state solves inside the outer problem. Tighter
/// than the solver defaults so finite differences of the cost stay clean.
struct StateTolerances {
  double variational = 1e-11;
  double monotone = 1e-11;
  double quasilinear = 1e-13;
};

/// State y_u; `warm` seeds the iterative solvers.
ScalarField solve_state_for(const ControlProblem &cp, const ScalarField &u,
                            const std::optional<ScalarField> &warm = std::nullopt,
                            const StateTolerances &tol = {});

/// Tracking part sum_i w_i F(y_i, yd_i) for a given state.
double tracking_term(const ControlProblem &cp, const ScalarField &y);
/// (M/2) R(u): R = sum_cells h^N |grad u|^2 or the trapezoid sum of u^2.
double regularizer_term(const ControlProblem &cp, const ScalarField &u);

double evaluate_cost(const ControlProblem &cp, const ScalarField &u);

enum class Difference { Forward, Central };

/// A cost evaluation together with the state it produced; the state seeds
/// nearby evaluations.
struct CostSample {
  double cost = 0.0;
  ScalarField state;
};
using CostFunction =
    std::function<CostSample(const ScalarField &u, const std::optional<ScalarField> &warm)>;

std::vector<double> fd_gradient(const CostFunction &cost, const ScalarField &u,
                                const CostSample &base, Difference scheme);

/// Finite-difference gradient of the discrete cost in the nodal values of u.
/// Step 1e-5 (1 + ||u||_inf).
std::vector<double> cost_gradient(const ControlProblem &cp, const ScalarField &u,
                                  Difference scheme = Difference::Forward);

struct ControlOptions {
  std::size_t max_iterations = 500;
  std::size_t max_line_search = 30;
  double stationarity = 1e-6;
  /// Relative cost decrease below which the iteration counts as stalled.
  double stall = 1e-14;
  StateTolerances state;
};

/// Gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking. A state failure during the line search shrinks the step.
/// Returns the best iterate; report.converged is false when the iteration
/// cap was hit or the line search failed. report.trace holds accepted costs.
std::pair<ScalarField, SolveReport> minimize_fd(const CostFunction &cost, const ScalarField &u0,
                                                const ControlOptions &opts = {});

/// minimize_fd on the classical cost of `cp`.
std::pair<ScalarField, SolveReport> optimize_control(const ControlProblem &cp,
                                                     const ScalarField &u0,
                                                     const ControlOptions &opts = {});

struct SequencePoint {
  int j = 0;
  /// Cost of the realized pair: exact integral of F along the laminated
  /// state plus the regularizer of the laminated control.
  double cost = 0.0;
  /// Classical cost E(u_j) on a refined mesh (quasilinear regime only).
  std::optional<double> classical_cost;
};

/// Realizes the two-atom control measure `mu` (with potential offset) and the
/// state measure `nu` as j-periodic laminates and records the cost of every
/// pair. 1D only.
std::vector<SequencePoint> minimizing_sequence_demo(const ControlProblem &cp,
                                                    const YoungMeasureField &mu, double offset,
                                                    const YoungMeasureField &nu,
                                                    const std::vector<int> &j_list,
                                                    bool classical = false);

}  // namespace qlc
