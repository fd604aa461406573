#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qlcontrol/grid.hpp"

namespace qlc {

class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using FluxMap = std::function<Vec2(const Vec2 &)>;
using LowerOrderMap = std::function<double(const Vec2 &)>;
/// Control-to-source map f(x, u).
using SourceMap = std::function<double(const Vec2 &x, double u)>;
/// Inner energy W(grad y, u).
using EnergyDensity = std::function<double(const Vec2 &, double u)>;
using EnergyGradient = std::function<Vec2(const Vec2 &, double u)>;
/// Cost integrand F(y; y_d); y_d is the tracking target at the same point.
using CostIntegrand = std::function<double(double y, double target)>;
using ScalarMap = std::function<double(double)>;

/// Declared structural constants. Which ones matter depends on the regime.
struct Constants {
  double lipschitz = 0.0;     ///< L, Lipschitz constant of a
  double monotonicity = 0.0;  ///< c
  double growth = 0.0;        ///< C
  double tychonov = 1.0;      ///< M
  double zero_order = 0.0;    ///< b
  double ellipticity = 0.0;   ///< a0 of the perturbed-linear family
};

/// The problem's functions. Each is optional; a problem declares what it
/// uses and the solvers check presence.
struct CoefficientSet {
  int dimension = 1;
  std::string name;

  FluxMap flux;                 // A
  LowerOrderMap lower;          // a, with a(0) = 0
  SourceMap source;             // f
  EnergyDensity energy;         // W
  EnergyGradient energy_grad;   // grad_y W, closed form when available
  std::optional<double> energy_quadratic;  // k when W = k/2 |y|^2 (+ u-only terms)
  CostIntegrand cost;           // F
  ScalarMap coupling;           // w in W(grad y) + w(y) u + f y
  std::optional<double> coupling_slope;    // s when w(y) = s*y
  double source_bound = 0.0;    // sup |f| when f is bounded, 0 if unbounded
  Constants k;

  /// Attribute a free-form description of each function for reports.
  std::vector<std::pair<std::string, std::string>> description;
};

struct HypothesisReport {
  std::string hypothesis;
  std::size_t samples = 0;
  /// Minimum over samples of the slack of the inequality; >= 0 means holds.
  double worst_margin = 0.0;
  bool pass = false;
};

inline constexpr double kHypothesisTolerance = 1e-10;
inline constexpr std::size_t kDefaultSamples = 10000;
inline constexpr double kDefaultRadius = 10.0;

/// A(y) = a0*y + g(y) with c = a0 - Lg and C = a0 + Lg (C is nudged above c
/// when Lg = 0). Rejects a0 - Lg <= 0 and g(0) != 0.
CoefficientSet make_perturbed_linear(double a0, FluxMap g, double lg, int dimension = 1);

/// (A(y1)-A(y2)).(y1-y2) >= c|y1-y2|^2 over sampled pairs in the ball.
HypothesisReport check_monotonicity(const CoefficientSet &cs, std::size_t samples = kDefaultSamples,
                                    double radius = kDefaultRadius, std::uint64_t seed = 1);
/// |A(y)| <= C(|y|+1), A(y).y >= c(|y|^2-1) when A is present;
/// |a(y)| <= C|y| when a is present.
HypothesisReport check_growth(const CoefficientSet &cs, std::size_t samples = kDefaultSamples,
                              double radius = kDefaultRadius, std::uint64_t seed = 1);
/// c(|y|^2-1) <= W(y,u) <= C(|y|^2+1) over sampled (y, u).
HypothesisReport check_w_growth(const CoefficientSet &cs, std::size_t samples = kDefaultSamples,
                                double radius = kDefaultRadius, std::uint64_t seed = 1);
/// Midpoint convexity of W in y for sampled u.
HypothesisReport check_w_convexity(const CoefficientSet &cs, std::size_t samples = kDefaultSamples,
                                   double radius = kDefaultRadius, std::uint64_t seed = 1);
/// a(0) = 0 and |a(y1)-a(y2)| <= L|y1-y2| over sampled pairs.
HypothesisReport check_lipschitz(const CoefficientSet &cs, std::size_t samples = kDefaultSamples,
                                 double radius = kDefaultRadius, std::uint64_t seed = 1);

// Built-in library. Each function returns a fragment; compose by assigning
// members of a CoefficientSet.
namespace builtin {

FluxMap identity_flux();
/// g(y) = scale * sin(y) per component; Lipschitz constant |scale|.
FluxMap sin_per_component(double scale);

/// a(y) = kappa * sin(e . y); L = C = |kappa|.
LowerOrderMap sin_gradient(double kappa, Vec2 e = {1.0, 0.0});
/// a(y) = kappa * clamp(e . y, -1, 1); L = C = |kappa|.
LowerOrderMap clamped_linear(double kappa, Vec2 e = {1.0, 0.0});
/// a(y) = kappa * (1 - cos(omega e . y)); wells at 2 pi k / omega, L = C = kappa*omega.
LowerOrderMap cosine_wells(double kappa, double omega, Vec2 e = {1.0, 0.0});

SourceMap source_identity();
SourceMap source_tanh();
SourceMap source_clamp(double scale = 1.0);

/// W = 1/2 |y|^2.
EnergyDensity half_square();
/// W = 1/2 |y|^2 + delta * sin^2(u): convex in y, nonconvex in u.
EnergyDensity half_square_nonconvex_u(double delta);
/// W = 1/2 |y|^2 + phi_R(|y|), phi_R(s) = s^4/4 up to R, C^2 quadratic beyond.
EnergyDensity clamped_quartic(double radius = 10.0);
EnergyGradient clamped_quartic_gradient(double radius = 10.0);

/// F(y; yd) = min((y - yd)^2, cap).
CostIntegrand tracking_clamped(double cap);
/// F(y) = -min(y, cap).
CostIntegrand negative_capped(double cap);
CostIntegrand zero_cost();

}  // namespace builtin

}  // namespace qlc
