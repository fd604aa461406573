#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "qlcontrol/coefficients.hpp"
#include "qlcontrol/grid.hpp"
#include "qlcontrol/report.hpp"

namespace qlc {

enum class EnergyForm {
  General,    ///< I(y,u) = int W(grad y, u) + f y
  AffineInU,  ///< I(y,u) = int W(grad y) + w(y) u + f y
};

/// State defined as the minimizer over H^1_0 of the inner energy I(., u).
struct VariationalStateProblem {
  Mesh mesh;
  CoefficientSet coeffs;
  ScalarField source;  ///< f, nodal
  EnergyForm form = EnergyForm::General;

  /// Validates W (growth and midpoint convexity) unless `check` is false.
  static VariationalStateProblem create(const Mesh &mesh, CoefficientSet coeffs,
                                        ScalarField source, EnergyForm form, bool check = true);
};

struct VariationalOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
  std::optional<ScalarField> initial;
};

/// Quadrature value of I(y, u): midpoint on cells for W, trapezoid on nodes
/// for the zero-order terms. y must vanish on the boundary.
double inner_energy(const VariationalStateProblem &p, const ScalarField &y, const ScalarField &u);

/// Strong-form gradient of the discrete energy at interior nodes
/// (Euclidean gradient divided by h^N).
ScalarField energy_gradient(const VariationalStateProblem &p, const ScalarField &y,
                            const ScalarField &u);

/// H^{-1} norm of the energy gradient: ||grad (-Delta_h)^{-1} energy_gradient||.
double euler_lagrange_residual(const VariationalStateProblem &p, const ScalarField &y,
                               const ScalarField &u);

/// Minimizes I(., u). Sobolev-preconditioned gradient descent with
/// Barzilai-Borwein steps and a bisection fallback that keeps the energy
/// non-increasing; one linear solve when W is quadratic and w is linear.
/// Throws NonConvergenceError when the iteration cap is hit.
std::pair<ScalarField, SolveReport> solve_state(const VariationalStateProblem &p,
                                                const ScalarField &u,
                                                const VariationalOptions &opts = {});

/// Checks I(y,u) <= I(y + rho*r, u) + 1e-10 for random boundary-zeroed r.
HypothesisReport verify_minimality(const VariationalStateProblem &p, const ScalarField &y,
                                   const ScalarField &u, std::size_t trials,
                                   std::uint64_t seed = 7);

}  // namespace qlc
