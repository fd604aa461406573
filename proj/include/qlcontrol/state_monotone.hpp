#pragma once

#include <optional>
#include <utility>

#include "qlcontrol/coefficients.hpp"
#include "qlcontrol/grid.hpp"
#include "qlcontrol/report.hpp"

namespace qlc {

/// -div A(grad y) = f(x, u) in H^1_0 with strictly monotone, Lipschitz A.
struct MonotoneStateProblem {
  Mesh mesh;
  CoefficientSet coeffs;

  /// Runs check_monotonicity and check_growth with the declared c, C unless
  /// `check` is false; throws HypothesisError on failure.
  static MonotoneStateProblem create(const Mesh &mesh, CoefficientSet coeffs, bool check = true);

  /// f(x_k, u_k) at every node.
  ScalarField source_of(const ScalarField &u) const;
};

struct MonotoneOptions {
  /// Step of the preconditioned iteration; c / C^2 when unset.
  std::optional<double> step;
  double tolerance = 1e-8;
  std::size_t max_iterations = 100000;
  std::optional<ScalarField> initial;
};

/// Contraction factor sqrt(1 - 2 tau c + tau^2 C^2) of the preconditioned map.
double monotone_contraction_bound(double tau, double c, double C);

/// Zarantonello iteration y <- y - tau (-Delta_h)^{-1}[-div A(grad y) - f].
/// report.residual is the H^1_0 norm of the lifted residual; report.increments
/// holds the H^1_0 norm of every update.
std::pair<ScalarField, SolveReport> solve_monotone(const MonotoneStateProblem &p,
                                                   const ScalarField &u,
                                                   const MonotoneOptions &opts = {});

/// ||(-Delta_h)^{-1}(-div A(grad y) - f)||_{H^1_0}.
double monotone_residual(const MonotoneStateProblem &p, const ScalarField &y,
                         const ScalarField &u);

/// Checks <A(grad y), grad w> = <f, w> for every nodal hat function w:
/// max discrepancy <= 1e-7 (1 + ||f||).
HypothesisReport verify_limit_identity(const MonotoneStateProblem &p, const ScalarField &y,
                                       const ScalarField &u);

/// Poincare constant of the unit interval (1/pi) or square (1/(sqrt 2 pi)).
double poincare_constant(int dimension);

}  // namespace qlc
