#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "qlcontrol/coefficients.hpp"
#include "qlcontrol/grid.hpp"
#include "qlcontrol/report.hpp"

namespace qlc {

/// L^2/4: above it two solutions of -Lap y + a(grad y) + b y = F coincide.
double uniqueness_threshold(double lipschitz);

/// -Delta y + a(grad y) + b y = f(u), y in H^1_0, with a(0) = 0 Lipschitz.
struct QuasilinearStateProblem {
  Mesh mesh;
  CoefficientSet coeffs;  ///< lower (a), source (f), k.lipschitz, k.growth, k.zero_order
  bool unique = false;    ///< b > L^2/4
  std::vector<std::string> warnings;

  /// Requires b > L^2/4 (throws HypothesisError naming the threshold);
  /// warns when b is within 10% of it. Samples |a(y)| <= C|y| and a(0) = 0
  /// unless `check` is false.
  static QuasilinearStateProblem create(const Mesh &mesh, CoefficientSet coeffs,
                                        bool check = true);

  double b() const { return coeffs.k.zero_order; }
  ScalarField source_of(const ScalarField &u) const;
  /// Cell field a(grad y).
  ScalarField lower_of(const ScalarField &y) const;
};

/// Default b when a configuration omits it: max(1, 2 L^2/4).
double default_zero_order(double lipschitz);

struct QuasilinearOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 10000;
  std::optional<ScalarField> initial;
};

/// Picard iteration y <- (-Delta_h + b)^{-1}(f(u) - a(grad y)) until the
/// H^1 increment drops below the tolerance. report.residual holds the strong
/// residual in L^2; report.increments the H^1 increments.
std::pair<ScalarField, SolveReport> solve_quasilinear(const QuasilinearStateProblem &p,
                                                      const ScalarField &u,
                                                      const QuasilinearOptions &opts = {});

/// Reuses a factorization across solves with the same problem.
class QuasilinearSolver {
 public:
  explicit QuasilinearSolver(const QuasilinearStateProblem &p);
  std::pair<ScalarField, SolveReport> solve(const ScalarField &u,
                                            const QuasilinearOptions &opts = {}) const;
  const QuasilinearStateProblem &problem() const { return *p_; }
  const HelmholtzSolver &helmholtz() const { return helm_; }

 private:
  const QuasilinearStateProblem *p_;
  HelmholtzSolver helm_;
};

/// ||-Delta_h y + a(grad y) + b y - f(u)||_{L^2} over interior nodes.
double quasilinear_strong_residual(const QuasilinearStateProblem &p, const ScalarField &y,
                                   const ScalarField &u);

/// Solves from `trials` random initial iterates and checks pairwise
/// agreement to 1e-6 in max norm. Requires p.unique.
HypothesisReport verify_uniqueness(const QuasilinearStateProblem &p, const ScalarField &u,
                                   std::size_t trials, std::uint64_t seed = 11);

struct AprioriBound {
  double bound = 0.0;     ///< P ||f(u)|| / (1 - C^2/(4b))
  double gradient = 0.0;  ///< ||grad y||
  double ratio = 0.0;     ///< gradient / bound (0 when both vanish)
  bool holds = false;
};

/// Explicit bound on ||grad y||_{L^2} from the completed-squares estimate
/// with the exact Poincare constant. Throws HypothesisError if
/// 1 - C^2/(4b) <= 0.
AprioriBound apriori_gradient_bound(const QuasilinearStateProblem &p, const ScalarField &u,
                                    const std::optional<ScalarField> &solved = std::nullopt);

}  // namespace qlc
