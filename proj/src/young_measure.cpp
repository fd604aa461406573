#include "qlcontrol/young_measure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace qlc {

const char *to_string(MeasureClass c) {
  switch (c) {
    case MeasureClass::PH10: return "PH10";
    case MeasureClass::PH1: return "PH1";
    case MeasureClass::Unconstrained: return "unconstrained";
  }
  return "?";
}

YoungMeasureField::YoungMeasureField(Mesh mesh, std::size_t atoms_per_cell)
    : mesh_(std::move(mesh)), k_(atoms_per_cell) {
  if (k_ == 0) throw std::invalid_argument("YoungMeasureField: atom budget must be positive");
  atoms_.assign(mesh_.cell_count() * k_, Vec2{});
  weights_.assign(mesh_.cell_count() * k_, 0.0);
  for (std::size_t c = 0; c < mesh_.cell_count(); ++c) weights_[c * k_] = 1.0;
}

double YoungMeasureField::normalization_error() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < cell_count(); ++c) {
    double s = 0.0;
    for (std::size_t k = 0; k < k_; ++k) {
      const double p = weight(c, k);
      worst = std::max(worst, -p);
      s += p;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

YoungMeasureField dirac_field(const VectorField &v, std::size_t atoms_per_cell) {
  YoungMeasureField ym(v.mesh, atoms_per_cell);
  for (std::size_t c = 0; c < ym.cell_count(); ++c)
    for (std::size_t k = 0; k < atoms_per_cell; ++k) ym.atom(c, k) = v.values[c];
  ym.set_tag(classify(ym));
  return ym;
}

ScalarField moment(const YoungMeasureField &ym, const Integrand &psi) {
  ScalarField r = ScalarField::zeros(ym.mesh(), Location::Cell);
  for (std::size_t c = 0; c < ym.cell_count(); ++c) {
    double s = 0.0;
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k) {
      const double p = ym.weight(c, k);
      if (p == 0.0) continue;
      const double v = psi(ym.atom(c, k));
      if (!std::isfinite(v)) throw std::domain_error("moment: integrand is not finite at an atom");
      s += p * v;
    }
    r.values[c] = s;
  }
  return r;
}

VectorField barycenter(const YoungMeasureField &ym) {
  VectorField r = VectorField::zeros(ym.mesh());
  for (std::size_t c = 0; c < ym.cell_count(); ++c) {
    Vec2 s;
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k) s += ym.weight(c, k) * ym.atom(c, k);
    r.values[c] = s;
  }
  return r;
}

double second_moment(const YoungMeasureField &ym) {
  double s = 0.0;
  for (std::size_t c = 0; c < ym.cell_count(); ++c)
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k)
      s += ym.weight(c, k) * norm2(ym.atom(c, k));
  return s * ym.mesh().cell_volume();
}

double gradient_range_distance(const VectorField &g, bool dirichlet) {
  const GradientLeastSquares ls(g.mesh, dirichlet);
  return l2_norm(g - gradient(ls.potential(g)));
}

MeasureClass classify(const YoungMeasureField &ym) {
  const VectorField g = barycenter(ym);
  const double tol = 1e-10 * (1.0 + l2_norm(g));
  if (gradient_range_distance(g, true) <= tol) return MeasureClass::PH10;
  if (gradient_range_distance(g, false) <= tol) return MeasureClass::PH1;
  return MeasureClass::Unconstrained;
}

YoungMeasureField shift_to_barycenter(const YoungMeasureField &ym, const VectorField &target) {
  require_same_mesh(ym.mesh(), target.mesh, "shift_to_barycenter");
  YoungMeasureField out = ym;
  const VectorField g = barycenter(ym);
  for (std::size_t c = 0; c < ym.cell_count(); ++c) {
    const Vec2 d = target.values[c] - g.values[c];
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k) out.atom(c, k) += d;
  }
  return out;
}

YoungMeasureField project_class(const YoungMeasureField &ym, MeasureClass target) {
  if (target == MeasureClass::Unconstrained) return ym;
  const VectorField g = barycenter(ym);
  const GradientLeastSquares ls(ym.mesh(), target == MeasureClass::PH10);
  YoungMeasureField out = shift_to_barycenter(ym, gradient(ls.potential(g)));
  out.set_tag(target);
  return out;
}

double Laminate::operator()(double t) const {
  if (x.empty()) return 0.0;
  if (t <= x.front()) return value.front();
  if (t >= x.back()) return value.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double s = (t - x[i]) / (x[i + 1] - x[i]);
  return value[i] + s * (value[i + 1] - value[i]);
}

double Laminate::derivative_mean(double a, double b,
                                 const std::function<double(double)> &psi) const {
  if (!(b > a)) throw std::invalid_argument("derivative_mean: empty interval");
  double s = 0.0;
  for (std::size_t i = 0; i < pieces(); ++i) {
    const double lo = std::max(a, x[i]);
    const double hi = std::min(b, x[i + 1]);
    if (hi > lo) s += (hi - lo) * psi(slope(i));
  }
  return s / (b - a);
}

ScalarField Laminate::sample(const Mesh &mesh) const {
  if (mesh.dimension() != 1) throw std::invalid_argument("Laminate::sample: 1D mesh expected");
  ScalarField f = ScalarField::zeros(mesh);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = (*this)(mesh.node_coords(k).x);
  return f;
}

ScalarField barycenter_potential_1d(const YoungMeasureField &ym, double offset) {
  const Mesh &m = ym.mesh();
  if (m.dimension() != 1) throw std::invalid_argument("barycenter potential: 1D only");
  const VectorField g = barycenter(ym);
  ScalarField u = ScalarField::zeros(m);
  u.values[0] = offset;
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    u.values[c + 1] = u.values[c] + m.h() * g.values[c].x;
  return u;
}

Laminate realize_sequence(const YoungMeasureField &ym, int j, double offset) {
  const Mesh &m = ym.mesh();
  if (m.dimension() != 1) throw std::invalid_argument("realize_sequence: only 1D laminates");
  if (j < 1) throw std::invalid_argument("realize_sequence: j must be positive");
  const ScalarField pot = barycenter_potential_1d(ym, offset);
  const double h = m.h();
  Laminate lam;
  lam.x.push_back(0.0);
  lam.value.push_back(pot.values[0]);
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    // Collect the atoms with positive weight.
    double lo = 0.0, hi = 0.0, w_lo = 0.0, w_hi = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k) {
      const double p = ym.weight(c, k);
      if (p <= 0.0) continue;
      const double l = ym.atom(c, k).x;
      if (count == 0) {
        lo = l;
        w_lo = p;
        ++count;
      } else if (l == lo) {
        w_lo += p;
      } else if (count == 1) {
        hi = l;
        w_hi = p;
        ++count;
      } else if (l == hi) {
        w_hi += p;
      } else {
        throw std::invalid_argument("realize_sequence: more than two atoms in a cell");
      }
    }
    if (count == 2 && hi < lo) {
      std::swap(lo, hi);
      std::swap(w_lo, w_hi);
    }
    const double x0 = static_cast<double>(c) * h;
    const double y0 = pot.values[c];
    const double y1 = pot.values[c + 1];
    if (count < 2) {
      lam.x.push_back(x0 + h);
      lam.value.push_back(y1);
      continue;
    }
    const double theta = w_hi / (w_lo + w_hi);
    const double period = h / j;
    double v = y0;
    for (int q = 0; q < j; ++q) {
      const double xs = x0 + q * period;
      v += lo * (1.0 - theta) * period;
      lam.x.push_back(xs + (1.0 - theta) * period);
      lam.value.push_back(v);
      v += hi * theta * period;
      lam.x.push_back(q + 1 == j ? x0 + h : xs + period);
      lam.value.push_back(q + 1 == j ? y1 : v);
    }
  }
  return lam;
}

void write_measure_csv(std::ostream &os, const YoungMeasureField &ym) {
  const bool two_d = ym.mesh().dimension() == 2;
  os << (two_d ? "cell,atom_index,lambda_x,lambda_y,weight\n" : "cell,atom_index,lambda_x,weight\n");
  os << std::setprecision(17);
  for (std::size_t c = 0; c < ym.cell_count(); ++c)
    for (std::size_t k = 0; k < ym.atoms_per_cell(); ++k) {
      const Vec2 &a = ym.atom(c, k);
      os << c << ',' << k << ',' << a.x;
      if (two_d) os << ',' << a.y;
      os << ',' << ym.weight(c, k) << '\n';
    }
}

}  // namespace qlc
