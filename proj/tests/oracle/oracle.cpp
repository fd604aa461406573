#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

double max_abs(const std::vector<double> &v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Trapezoid weight of node i on a uniform 1D grid.
double weight(int cells, int i) {
  const double h = 1.0 / cells;
  return (i == 0 || i == cells) ? 0.5 * h : h;
}

}  // namespace

std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
    if (std::abs(A[piv][k]) < 1e-300) throw std::runtime_error("dense_solve: singular matrix");
    std::swap(A[k], A[piv]);
    std::swap(rhs[k], rhs[piv]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double m = A[r][k] / A[k][k];
      if (m == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) A[r][c] -= m * A[k][c];
      rhs[r] -= m * rhs[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= A[k][c] * x[c];
    x[k] = s / A[k][k];
  }
  return x;
}

std::vector<double> state_residual(const StateSystem1D &s, const std::vector<double> &y) {
  const int n = s.cells;
  const double h = 1.0 / n;
  std::vector<double> p(n);
  for (int c = 0; c < n; ++c) p[c] = (y[c + 1] - y[c]) / h;
  std::vector<double> r(n - 1);
  for (int i = 1; i < n; ++i) {
    if (s.lower)
      r[i - 1] = (-y[i - 1] + 2.0 * y[i] - y[i + 1]) / (h * h) +
                 0.5 * (s.lower(p[i - 1]) + s.lower(p[i])) + s.b * y[i] - s.f[i];
    else
      r[i - 1] = -(s.flux(p[i]) - s.flux(p[i - 1])) / h - s.f[i];
  }
  return r;
}

OracleResult newton_state_oracle(const StateSystem1D &s, std::optional<std::vector<double>> start,
                                 double tolerance, std::size_t max_iterations) {
  const int n = s.cells;
  std::vector<double> y = start.value_or(std::vector<double>(n + 1, 0.0));
  y.front() = y.back() = 0.0;
  OracleResult out;
  out.instance = s.lower ? "quasilinear-1d" : "monotone-1d";
  out.tolerance = tolerance;
  auto r = state_residual(s, y);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    out.residual = max_abs(r);
    if (!std::isfinite(out.residual)) break;
    if (out.residual <= tolerance) {
      out.pass = true;
      break;
    }
    std::vector<std::vector<double>> J(n - 1, std::vector<double>(n - 1));
    for (int j = 1; j < n; ++j) {
      const double step = 1e-7 * (1.0 + std::abs(y[j]));
      auto yp = y;
      yp[j] += step;
      const auto rp = state_residual(s, yp);
      for (int i = 0; i < n - 1; ++i) J[i][j - 1] = (rp[i] - r[i]) / step;
    }
    std::vector<double> d;
    try {
      d = dense_solve(J, r);
    } catch (const std::runtime_error &) {
      break;
    }
    // Damped update: halve until the residual does not grow.
    double t = 1.0;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      auto trial = y;
      for (int i = 1; i < n; ++i) trial[i] -= t * d[i - 1];
      const auto rt = state_residual(s, trial);
      if (max_abs(rt) < out.residual || k == 29) {
        y = std::move(trial);
        r = rt;
        break;
      }
    }
    out.iterations = it + 1;
  }
  out.residual = max_abs(r);
  out.pass = out.residual <= tolerance;
  out.values = std::move(y);
  return out;
}

double energy_value(const Energy1D &e, const std::vector<double> &y) {
  const int n = e.cells;
  const double h = 1.0 / n;
  double E = 0.0;
  for (int c = 0; c < n; ++c)
    E += h * e.W((y[c + 1] - y[c]) / h, 0.5 * (e.u[c] + e.u[c + 1]));
  for (int i = 0; i <= n; ++i) E += weight(n, i) * (e.f[i] * y[i] + y[i] * e.u[i]);
  return E;
}

OracleResult coordinate_descent_oracle(const Energy1D &e, double tolerance, std::size_t max_sweeps) {
  const int n = e.cells;
  const double h = 1.0 / n;
  std::vector<double> y(n + 1, 0.0);
  // Energy terms touching node i only.
  auto local = [&](const std::vector<double> &v, int i) {
    return h * e.W((v[i] - v[i - 1]) / h, 0.5 * (e.u[i - 1] + e.u[i])) +
           h * e.W((v[i + 1] - v[i]) / h, 0.5 * (e.u[i] + e.u[i + 1])) +
           weight(n, i) * (e.f[i] + e.u[i]) * v[i];
  };
  OracleResult out;
  out.instance = "variational-1d";
  out.tolerance = tolerance;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int i = 1; i < n; ++i) {
      // Newton on the one-dimensional convex slice with central differences.
      for (int k = 0; k < 40; ++k) {
        const double s = 1e-5 * (1.0 + std::abs(y[i]));
        auto v = y;
        v[i] = y[i] + s;
        const double fp = local(v, i);
        v[i] = y[i] - s;
        const double fm = local(v, i);
        const double f0 = local(y, i);
        const double g = (fp - fm) / (2.0 * s);
        const double H = (fp - 2.0 * f0 + fm) / (s * s);
        if (!(H > 0.0)) break;
        double d = -g / H;
        // Backtrack to keep the slice energy from rising.
        for (int m = 0; m < 30; ++m, d *= 0.5) {
          v[i] = y[i] + d;
          if (local(v, i) <= f0) break;
        }
        y[i] += d;
        change = std::max(change, std::abs(d));
        if (std::abs(d) < 1e-15 * (1.0 + std::abs(y[i]))) break;
      }
    }
    out.iterations = sweep + 1;
    out.residual = change;
    if (change <= tolerance) {
      out.pass = true;
      break;
    }
  }
  out.values = std::move(y);
  return out;
}

double quadratic_cost(const QuadraticControl1D &q, const std::vector<double> &u) {
  const int n = q.cells;
  const double h = 1.0 / n;
  // Stiffness K y = -w (f + u) on interior nodes.
  std::vector<std::vector<double>> K(n - 1, std::vector<double>(n - 1, 0.0));
  std::vector<double> rhs(n - 1);
  for (int i = 1; i < n; ++i) {
    K[i - 1][i - 1] = 2.0 / h;
    if (i > 1) K[i - 1][i - 2] = -1.0 / h;
    if (i < n - 1) K[i - 1][i] = -1.0 / h;
    rhs[i - 1] = -weight(n, i) * (q.f[i] + u[i]);
  }
  const auto yi = dense_solve(K, rhs);
  double J = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = (i == 0 || i == n) ? 0.0 : yi[i - 1];
    J += weight(n, i) * (y - q.target[i]) * (y - q.target[i]);
  }
  for (int c = 0; c < n; ++c) {
    const double g = (u[c + 1] - u[c]) / h;
    J += 0.5 * q.M * h * g * g;
  }
  return J;
}

QuadraticSolution quadratic_program_oracle(const QuadraticControl1D &q) {
  const int n = q.cells;
  const int m = n + 1;
  // The cost is an exact quadratic in u: recover its Hessian and gradient at
  // zero by second differences (exact up to rounding), then solve H u = -g.
  const std::vector<double> zero(m, 0.0);
  const double J0 = quadratic_cost(q, zero);
  std::vector<double> Je(m);
  for (int i = 0; i < m; ++i) {
    auto e = zero;
    e[i] = 1.0;
    Je[i] = quadratic_cost(q, e);
  }
  std::vector<std::vector<double>> H(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      auto e = zero;
      e[i] = e[j] = 1.0;
      H[i][j] = H[j][i] = quadratic_cost(q, e) - Je[i] - Je[j] + J0;
    }
  for (int i = 0; i < m; ++i) {
    auto e = zero;
    e[i] = 2.0;
    H[i][i] = quadratic_cost(q, e) - 2.0 * Je[i] + J0;
  }
  std::vector<double> g(m);
  for (int i = 0; i < m; ++i) g[i] = -(Je[i] - J0 - 0.5 * H[i][i]);
  QuadraticSolution s;
  s.u = dense_solve(H, g);
  s.cost = quadratic_cost(q, s.u);
  // State at the optimum, reassembled for the caller.
  const double h = 1.0 / n;
  std::vector<std::vector<double>> K(n - 1, std::vector<double>(n - 1, 0.0));
  std::vector<double> rhs(n - 1);
  for (int i = 1; i < n; ++i) {
    K[i - 1][i - 1] = 2.0 / h;
    if (i > 1) K[i - 1][i - 2] = -1.0 / h;
    if (i < n - 1) K[i - 1][i] = -1.0 / h;
    rhs[i - 1] = -weight(n, i) * (q.f[i] + s.u[i]);
  }
  const auto yi = dense_solve(K, rhs);
  s.y.assign(m, 0.0);
  for (int i = 1; i < n; ++i) s.y[i] = yi[i - 1];
  return s;
}

LatticeResult enumerate_controls_oracle(const std::function<double(const std::vector<double> &)> &cost,
                                        const std::vector<double> &value_set, int nodes) {
  if (nodes < 1 || nodes > 7) throw std::length_error("enumerate_controls_oracle: nodes must be in [1, 7]");
  const std::size_t k = value_set.size();
  std::size_t total = 1;
  for (int i = 0; i < nodes; ++i) {
    total *= k;
    if (total > 2187) throw std::length_error("enumerate_controls_oracle: more than 3^7 combinations");
  }
  LatticeResult out;
  out.best = std::numeric_limits<double>::infinity();
  std::vector<double> u(nodes);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int i = 0; i < nodes; ++i, c /= k) u[i] = value_set[c % k];
    const double J = cost(u);
    ++out.evaluated;
    if (J < out.best) {
      out.best = J;
      out.argmin = u;
    }
  }
  return out;
}

double helmholtz_constant_solution(double b, double x) {
  if (b == 0.0) return 0.5 * x * (1.0 - x);
  const double r = std::sqrt(b);
  return (1.0 - std::cosh(r * (x - 0.5)) / std::cosh(0.5 * r)) / b;
}

double helmholtz_sine_solution(double x) { return std::sin(std::numbers::pi * x); }

}  // namespace oracle
