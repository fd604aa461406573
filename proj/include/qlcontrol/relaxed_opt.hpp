#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlcontrol/control_opt.hpp"
#include "qlcontrol/young_measure.hpp"

namespace qlc {

/// Raised when a state measure does not satisfy grad y = barycenter.
class InfeasibleMeasure : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kFeasibilityTolerance = 1e-6;

/// Measure-valued relaxation of a quasilinear control problem.
struct RelaxedProblem {
  ControlProblem base;
  std::size_t state_atoms = 4;    ///< atom budget of nu
  std::size_t control_atoms = 4;  ///< atom budget of mu
  /// Margin m - m_bar known for designed instances.
  std::optional<double> designed_gap;

  static RelaxedProblem create(ControlProblem base, std::size_t state_atoms = 4,
                               std::size_t control_atoms = 4,
                               std::optional<double> designed_gap = std::nullopt);
  const QuasilinearStateProblem &state() const { return base.quasilinear(); }
};

/// Additive kernel component of the control potential: a constant, plus the
/// amplitude of the checkerboard mode in 2D (both lie in the kernel of the
/// discrete gradient on the full mesh).
struct ControlGauge {
  double constant = 0.0;
  double checkerboard = 0.0;
};

/// u with grad u = barycenter(mu) and the given kernel component.
ScalarField recover_control(const YoungMeasureField &mu, const ControlGauge &gauge);
/// Kernel component of u, so that recover_control(dirac(grad u), gauge_of(u)) = u.
ControlGauge gauge_of(const ScalarField &u);

struct MvState {
  ScalarField y;
  double consistency = 0.0;  ///< ||grad y - barycenter(nu)||_{L2}
};

/// y = (-Delta_h + b)^{-1}(f(u) - abar), abar = moment(nu, a). Throws
/// InfeasibleMeasure when nu is not in PH10.
MvState solve_mv_state(const RelaxedProblem &rp, const ScalarField &u, const YoungMeasureField &nu);

/// Keeps every atom's offset from its cell barycenter and moves the
/// barycenters to grad y of the resulting state (a fixed point that
/// contracts under b > L^2/4). Returns the restored measure and its state.
struct Restored {
  YoungMeasureField nu;
  ScalarField y;
  double consistency = 0.0;
  std::size_t iterations = 0;
};
Restored restore_feasibility(const RelaxedProblem &rp, const ScalarField &u,
                             const YoungMeasureField &nu,
                             const std::optional<ScalarField> &warm = std::nullopt,
                             double tolerance = 1e-13);

/// sum_i w_i F(y_i) + (M/2) second_moment(mu) (gradient regularizer) or
/// (M/2) trapz(u^2) (L^2 regularizer). Throws InfeasibleMeasure when the
/// consistency of nu exceeds kFeasibilityTolerance.
double evaluate_relaxed_cost(const RelaxedProblem &rp, const YoungMeasureField &mu,
                             const ControlGauge &gauge, const YoungMeasureField &nu);

struct RelaxedPoint {
  YoungMeasureField mu;
  ControlGauge gauge;
  YoungMeasureField nu;
  ScalarField y;
  double cost = 0.0;
};

/// Dirac embedding (delta_{grad u}, delta_{grad y_u}) of a classical control.
RelaxedPoint dirac_embedding(const RelaxedProblem &rp, const ScalarField &u);

struct RelaxedOptions {
  std::size_t max_outer = 30;
  std::size_t max_inner = 60;
  double stationarity = 1e-5;
  /// Search radius and resolution of the per-cell two-atom envelope search.
  double envelope_radius = 1.0;
  std::size_t envelope_points = 64;
  /// Iteration cap of each control sweep.
  std::size_t control_iterations = 40;
};

struct Certificate {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

struct RelaxationReport {
  std::string instance;
  double classical_best = 0.0;  ///< m-hat
  double relaxed = 0.0;         ///< m-bar-hat
  double gap = 0.0;             ///< m-hat - m-bar-hat
  std::optional<double> designed_gap;
  double dirac_residual = 0.0;
  double consistency = 0.0;
  double normalization_error = 0.0;
  double stationarity = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool feasible = true;
  std::vector<double> trace;
  std::vector<SequencePoint> sequence;
  std::vector<Certificate> certificates;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  double wall_time_s = 0.0;

  bool passed() const;
};

/// Alternating descent from `init`: (i) per-cell two-atom envelope moves of
/// nu at fixed u, accepted only after restoration and only when the cost
/// drops; (ii) descent in u at fixed atom offsets, with mu the Dirac field of
/// grad u (for a fixed barycenter the Dirac measure minimizes the second
/// moment). The cost never increases from the initial point.
std::pair<RelaxedPoint, RelaxationReport> optimize_relaxed(const RelaxedProblem &rp,
                                                           const RelaxedPoint &init,
                                                           const RelaxedOptions &opts = {});

struct GapOptions {
  std::size_t samples = 8;
  std::uint64_t seed = 1;
  /// Also run the laminate sequence and compare its limit (1D only).
  bool sequence = true;
  std::vector<int> j_list{2, 4, 8, 16, 32};
  ControlOptions control;
  RelaxedOptions relaxed;
};

/// m-hat from classical optimizer runs and sampled controls, m-bar-hat from
/// optimize_relaxed started at the best classical control, and the
/// certificate list. A failed inequality marks the report FAILED.
std::pair<RelaxedPoint, RelaxationReport> certify_gap(const RelaxedProblem &rp,
                                                      const GapOptions &opts = {});

}  // namespace qlc
