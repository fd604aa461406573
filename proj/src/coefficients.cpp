#include "qlcontrol/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qlc {

namespace {

class BallSampler {
 public:
  BallSampler(int dimension, double radius, std::uint64_t seed)
      : dim_(dimension), radius_(radius), rng_(seed) {}

  Vec2 point() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if (dim_ == 1) return {radius_ * u(rng_), 0.0};
    // Rejection from the square keeps the distribution uniform in the disc.
    for (;;) {
      Vec2 p{u(rng_), u(rng_)};
      if (norm2(p) <= 1.0) return radius_ * p;
    }
  }

  double scalar() {
    std::uniform_real_distribution<double> u(-radius_, radius_);
    return u(rng_);
  }

 private:
  int dim_;
  double radius_;
  std::mt19937_64 rng_;
};

HypothesisReport finish(std::string name, std::size_t samples, double worst) {
  HypothesisReport r;
  r.hypothesis = std::move(name);
  r.samples = samples;
  r.worst_margin = worst;
  r.pass = worst >= -kHypothesisTolerance;
  return r;
}

}  // namespace

CoefficientSet make_perturbed_linear(double a0, FluxMap g, double lg, int dimension) {
  if (!(a0 > 0.0)) throw HypothesisError("perturbed-linear flux needs a0 > 0");
  if (!(lg >= 0.0)) throw HypothesisError("perturbed-linear flux needs Lg >= 0");
  if (!(a0 - lg > 0.0))
    throw HypothesisError("perturbed-linear flux is not strictly monotone: a0 - Lg = " +
                          std::to_string(a0 - lg) + " <= 0");
  if (!g) g = [](const Vec2 &) { return Vec2{}; };
  if (norm(g(Vec2{})) != 0.0) throw HypothesisError("perturbed-linear flux needs g(0) = 0");
  CoefficientSet cs;
  cs.dimension = dimension;
  cs.name = "perturbed-linear";
  cs.flux = [a0, g](const Vec2 &y) { return a0 * y + g(y); };
  cs.k.ellipticity = a0;
  cs.k.monotonicity = a0 - lg;
  // 0 < c < C must hold strictly; the identity case has c = C.
  cs.k.growth = std::max(a0 + lg, cs.k.monotonicity * (1.0 + 1e-12));
  cs.description.emplace_back("flux", "a0*y + g(y), a0=" + std::to_string(a0) +
                                          ", Lg=" + std::to_string(lg));
  return cs;
}

HypothesisReport check_monotonicity(const CoefficientSet &cs, std::size_t samples, double radius,
                                    std::uint64_t seed) {
  if (!cs.flux) throw std::invalid_argument("check_monotonicity: flux A is absent");
  BallSampler s(cs.dimension, radius, seed);
  const double c = cs.k.monotonicity;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec2 p = s.point();
    const Vec2 q = s.point();
    const Vec2 d = p - q;
    worst = std::min(worst, dot(cs.flux(p) - cs.flux(q), d) - c * norm2(d));
  }
  return finish("monotonicity", samples, worst);
}

HypothesisReport check_growth(const CoefficientSet &cs, std::size_t samples, double radius,
                              std::uint64_t seed) {
  if (!cs.flux && !cs.lower) throw std::invalid_argument("check_growth: neither A nor a present");
  BallSampler s(cs.dimension, radius, seed);
  const double c = cs.k.monotonicity;
  const double C = cs.k.growth;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec2 p = s.point();
    const double r = norm(p);
    if (cs.flux) {
      const Vec2 A = cs.flux(p);
      worst = std::min(worst, C * (r + 1.0) - norm(A));
      worst = std::min(worst, dot(A, p) - c * (r * r - 1.0));
    }
    if (cs.lower) worst = std::min(worst, C * r - std::abs(cs.lower(p)));
  }
  return finish("growth", samples, worst);
}

HypothesisReport check_w_growth(const CoefficientSet &cs, std::size_t samples, double radius,
                                std::uint64_t seed) {
  if (!cs.energy) throw std::invalid_argument("check_w_growth: W is absent");
  BallSampler s(cs.dimension, radius, seed);
  const double c = cs.k.monotonicity;
  const double C = cs.k.growth;
  double worst = std::numeric_limits<double>::infinity();
  // y = 0 is where additive bumps are most likely to break the upper bound.
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec2 p = k == 0 ? Vec2{} : s.point();
    const double u = s.scalar();
    const double W = cs.energy(p, u);
    const double r2 = norm2(p);
    worst = std::min(worst, W - c * (r2 - 1.0));
    worst = std::min(worst, C * (r2 + 1.0) - W);
  }
  return finish("energy-growth", samples, worst);
}

HypothesisReport check_w_convexity(const CoefficientSet &cs, std::size_t samples, double radius,
                                   std::uint64_t seed) {
  if (!cs.energy) throw std::invalid_argument("check_w_convexity: W is absent");
  BallSampler s(cs.dimension, radius, seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec2 p = s.point();
    const Vec2 q = s.point();
    const double u = s.scalar();
    const double mid = cs.energy(0.5 * (p + q), u);
    const double avg = 0.5 * (cs.energy(p, u) + cs.energy(q, u));
    // Roundoff scale of the comparison.
    const double scale = 1e-13 * (std::abs(avg) + 1.0);
    worst = std::min(worst, avg - mid + scale);
  }
  return finish("energy-convexity", samples, worst);
}

HypothesisReport check_lipschitz(const CoefficientSet &cs, std::size_t samples, double radius,
                                 std::uint64_t seed) {
  if (!cs.lower) throw std::invalid_argument("check_lipschitz: a is absent");
  BallSampler s(cs.dimension, radius, seed);
  const double L = cs.k.lipschitz;
  double worst = -std::abs(cs.lower(Vec2{}));
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec2 p = s.point();
    const Vec2 q = s.point();
    worst = std::min(worst, L * norm(p - q) - std::abs(cs.lower(p) - cs.lower(q)));
  }
  return finish("lipschitz", samples, worst);
}

namespace builtin {

FluxMap identity_flux() {
  return [](const Vec2 &y) { return y; };
}

FluxMap sin_per_component(double scale) {
  return [scale](const Vec2 &y) { return Vec2{scale * std::sin(y.x), scale * std::sin(y.y)}; };
}

LowerOrderMap sin_gradient(double kappa, Vec2 e) {
  return [kappa, e](const Vec2 &y) { return kappa * std::sin(dot(e, y)); };
}

LowerOrderMap clamped_linear(double kappa, Vec2 e) {
  return [kappa, e](const Vec2 &y) { return kappa * std::clamp(dot(e, y), -1.0, 1.0); };
}

LowerOrderMap cosine_wells(double kappa, double omega, Vec2 e) {
  return [kappa, omega, e](const Vec2 &y) { return kappa * (1.0 - std::cos(omega * dot(e, y))); };
}

SourceMap source_identity() {
  return [](const Vec2 &, double u) { return u; };
}

SourceMap source_tanh() {
  return [](const Vec2 &, double u) { return std::tanh(u); };
}

SourceMap source_clamp(double scale) {
  return [scale](const Vec2 &, double u) { return scale * std::clamp(u, -1.0, 1.0); };
}

EnergyDensity half_square() {
  return [](const Vec2 &y, double) { return 0.5 * norm2(y); };
}

EnergyDensity half_square_nonconvex_u(double delta) {
  return [delta](const Vec2 &y, double u) {
    const double s = std::sin(u);
    return 0.5 * norm2(y) + delta * s * s;
  };
}

namespace {
double quartic_phi(double s, double R) {
  if (s <= R) return 0.25 * s * s * s * s;
  const double t = s - R;
  return 0.25 * R * R * R * R + R * R * R * t + 1.5 * R * R * t * t;
}
double quartic_dphi(double s, double R) {
  if (s <= R) return s * s * s;
  return R * R * R + 3.0 * R * R * (s - R);
}
}  // namespace

EnergyDensity clamped_quartic(double radius) {
  return [radius](const Vec2 &y, double) { return 0.5 * norm2(y) + quartic_phi(norm(y), radius); };
}

EnergyGradient clamped_quartic_gradient(double radius) {
  return [radius](const Vec2 &y, double) {
    const double s = norm(y);
    // dphi(s)/s is continuous at 0 (s^2).
    const double ratio = s <= radius ? s * s : quartic_dphi(s, radius) / s;
    return (1.0 + ratio) * y;
  };
}

CostIntegrand tracking_clamped(double cap) {
  return [cap](double y, double yd) { return std::min((y - yd) * (y - yd), cap); };
}

CostIntegrand negative_capped(double cap) {
  return [cap](double y, double) { return -std::min(y, cap); };
}

CostIntegrand zero_cost() {
  return [](double, double) { return 0.0; };
}

}  // namespace builtin

}  // namespace qlc
