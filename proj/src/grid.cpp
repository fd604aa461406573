#include "qlcontrol/grid.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "banded.hpp"

namespace qlc {

namespace {

// Gradient weights of the cell corners, in the order of Mesh::cell_nodes.
struct CellStencil {
  std::array<double, 4> dx{};
  std::array<double, 4> dy{};
};

CellStencil cell_stencil(const Mesh &m) {
  CellStencil s;
  const double h = m.h();
  if (m.dimension() == 1) {
    s.dx = {-1.0 / h, 1.0 / h, 0.0, 0.0};
  } else {
    const double q = 0.5 / h;
    s.dx = {-q, q, -q, q};
    s.dy = {-q, -q, q, q};
  }
  return s;
}

void require_nodal(const ScalarField &f, const char *what) {
  if (f.location != Location::Node)
    throw std::invalid_argument(std::string(what) + ": expected a nodal field");
  if (f.values.size() != f.mesh.node_count())
    throw std::invalid_argument(std::string(what) + ": field length does not match mesh");
}

void require_cell(const ScalarField &f, const char *what) {
  if (f.location != Location::Cell)
    throw std::invalid_argument(std::string(what) + ": expected a cell field");
  if (f.values.size() != f.mesh.cell_count())
    throw std::invalid_argument(std::string(what) + ": field length does not match mesh");
}

// Assembles sum_c h^N G_c^T G_c over the unknowns selected by `pos`
// (pos[node] == npos drops the node), plus `shift` on the diagonal.
detail::BandedSpd assemble_stiffness(const Mesh &m, const std::vector<std::size_t> &pos,
                                     std::size_t unknowns, std::size_t bandwidth, double scale,
                                     double shift) {
  detail::BandedSpd A(unknowns, bandwidth);
  const CellStencil st = cell_stencil(m);
  const int nc = m.corners();
  const double vol = m.cell_volume();
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const auto nodes = m.cell_nodes(c);
    for (int a = 0; a < nc; ++a) {
      const std::size_t pa = pos[nodes[a]];
      if (pa == Mesh::npos) continue;
      for (int b = 0; b < nc; ++b) {
        const std::size_t pb = pos[nodes[b]];
        if (pb == Mesh::npos || pb > pa) continue;
        const double v = vol * (st.dx[a] * st.dx[b] + st.dy[a] * st.dy[b]);
        A.add(pa, pb, scale * v);
      }
    }
  }
  for (std::size_t i = 0; i < unknowns; ++i) A.add(i, i, shift);
  return A;
}

}  // namespace

Mesh::Mesh(int dimension, int cells_per_axis) : dim_(dimension), n_(cells_per_axis) {
  if (dimension != 1 && dimension != 2) throw MeshError("mesh dimension must be 1 or 2");
  if (cells_per_axis < 2) throw MeshError("cells_per_axis must be at least 2");
  h_ = 1.0 / cells_per_axis;
  interior_pos_.assign(node_count(), npos);
  for (std::size_t k = 0; k < node_count(); ++k) {
    if (!is_dirichlet(k)) {
      interior_pos_[k] = interior_.size();
      interior_.push_back(k);
    }
  }
}

Mesh build_mesh(int dimension, int cells_per_axis) { return Mesh(dimension, cells_per_axis); }

std::size_t Mesh::node_count() const {
  const std::size_t p = static_cast<std::size_t>(n_) + 1;
  return dim_ == 1 ? p : p * p;
}

std::size_t Mesh::cell_count() const {
  const std::size_t n = static_cast<std::size_t>(n_);
  return dim_ == 1 ? n : n * n;
}

bool Mesh::is_dirichlet(std::size_t node) const {
  const std::size_t p = static_cast<std::size_t>(n_) + 1;
  const std::size_t i = node % p;
  if (i == 0 || i == p - 1) return true;
  if (dim_ == 1) return false;
  const std::size_t j = node / p;
  return j == 0 || j == p - 1;
}

Vec2 Mesh::node_coords(std::size_t node) const {
  const std::size_t p = static_cast<std::size_t>(n_) + 1;
  if (dim_ == 1) return {static_cast<double>(node) * h_, 0.0};
  return {static_cast<double>(node % p) * h_, static_cast<double>(node / p) * h_};
}

Vec2 Mesh::cell_center(std::size_t cell) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  if (dim_ == 1) return {(static_cast<double>(cell) + 0.5) * h_, 0.0};
  return {(static_cast<double>(cell % n) + 0.5) * h_, (static_cast<double>(cell / n) + 0.5) * h_};
}

std::array<std::size_t, 4> Mesh::cell_nodes(std::size_t cell) const {
  if (dim_ == 1) return {cell, cell + 1, 0, 0};
  const std::size_t n = static_cast<std::size_t>(n_);
  const std::size_t i = cell % n;
  const std::size_t j = cell / n;
  const std::size_t base = node_index(static_cast<int>(i), static_cast<int>(j));
  const std::size_t p = n + 1;
  return {base, base + 1, base + p, base + p + 1};
}

double Mesh::node_weight(std::size_t node) const {
  const std::size_t p = static_cast<std::size_t>(n_) + 1;
  auto axis = [&](std::size_t i) { return (i == 0 || i == p - 1) ? 0.5 * h_ : h_; };
  if (dim_ == 1) return axis(node);
  return axis(node % p) * axis(node / p);
}

void require_same_mesh(const Mesh &a, const Mesh &b, const char *what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": mesh mismatch");
}

ScalarField ScalarField::zeros(const Mesh &m, Location loc) {
  return {m, loc, std::vector<double>(loc == Location::Node ? m.node_count() : m.cell_count(), 0.0)};
}

ScalarField ScalarField::constant(const Mesh &m, double v, Location loc) {
  ScalarField f = zeros(m, loc);
  std::fill(f.values.begin(), f.values.end(), v);
  return f;
}

bool ScalarField::vanishes_on_boundary() const {
  if (location != Location::Node) return false;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (mesh.is_dirichlet(k) && values[k] != 0.0) return false;
  return true;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

VectorField VectorField::zeros(const Mesh &m) { return {m, std::vector<Vec2>(m.cell_count())}; }

VectorField VectorField::constant(const Mesh &m, Vec2 v) {
  return {m, std::vector<Vec2>(m.cell_count(), v)};
}

ScalarField operator+(const ScalarField &a, const ScalarField &b) {
  require_same_mesh(a.mesh, b.mesh, "operator+");
  if (a.location != b.location) throw std::invalid_argument("operator+: location mismatch");
  ScalarField r = a;
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] += b.values[k];
  return r;
}

ScalarField operator-(const ScalarField &a, const ScalarField &b) {
  require_same_mesh(a.mesh, b.mesh, "operator-");
  if (a.location != b.location) throw std::invalid_argument("operator-: location mismatch");
  ScalarField r = a;
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] -= b.values[k];
  return r;
}

ScalarField operator*(double s, const ScalarField &a) {
  ScalarField r = a;
  for (double &v : r.values) v *= s;
  return r;
}

VectorField operator-(const VectorField &a, const VectorField &b) {
  require_same_mesh(a.mesh, b.mesh, "operator-");
  VectorField r = a;
  for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] -= b.values[k];
  return r;
}

VectorField gradient(const ScalarField &y) {
  require_nodal(y, "gradient");
  const Mesh &m = y.mesh;
  const CellStencil st = cell_stencil(m);
  VectorField g = VectorField::zeros(m);
  const int nc = m.corners();
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const auto nodes = m.cell_nodes(c);
    Vec2 v;
    for (int a = 0; a < nc; ++a) {
      v.x += st.dx[a] * y.values[nodes[a]];
      v.y += st.dy[a] * y.values[nodes[a]];
    }
    g.values[c] = v;
  }
  return g;
}

ScalarField divergence_full(const VectorField &q) {
  const Mesh &m = q.mesh;
  if (q.values.size() != m.cell_count())
    throw std::invalid_argument("divergence: field length does not match mesh");
  const CellStencil st = cell_stencil(m);
  ScalarField d = ScalarField::zeros(m);
  const int nc = m.corners();
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const auto nodes = m.cell_nodes(c);
    const Vec2 v = q.values[c];
    for (int a = 0; a < nc; ++a) d.values[nodes[a]] -= st.dx[a] * v.x + st.dy[a] * v.y;
  }
  return d;
}

ScalarField divergence_weak(const VectorField &q) {
  ScalarField d = divergence_full(q);
  for (std::size_t k = 0; k < d.values.size(); ++k)
    if (q.mesh.is_dirichlet(k)) d.values[k] = 0.0;
  return d;
}

ScalarField neg_laplacian(const ScalarField &y) { return -1.0 * divergence_weak(gradient(y)); }

ScalarField node_to_cell(const ScalarField &nodal) {
  require_nodal(nodal, "node_to_cell");
  const Mesh &m = nodal.mesh;
  ScalarField r = ScalarField::zeros(m, Location::Cell);
  const int nc = m.corners();
  const double w = 1.0 / nc;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const auto nodes = m.cell_nodes(c);
    double s = 0.0;
    for (int a = 0; a < nc; ++a) s += nodal.values[nodes[a]];
    r.values[c] = w * s;
  }
  return r;
}

ScalarField cell_to_node(const ScalarField &cell) {
  require_cell(cell, "cell_to_node");
  const Mesh &m = cell.mesh;
  ScalarField r = ScalarField::zeros(m);
  const int nc = m.corners();
  const double w = 1.0 / nc;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const auto nodes = m.cell_nodes(c);
    for (int a = 0; a < nc; ++a) r.values[nodes[a]] += w * cell.values[c];
  }
  for (std::size_t k = 0; k < r.values.size(); ++k)
    if (m.is_dirichlet(k)) r.values[k] = 0.0;
  return r;
}

double inner(const ScalarField &f, const ScalarField &g) {
  require_same_mesh(f.mesh, g.mesh, "inner");
  if (f.location != g.location || f.values.size() != g.values.size())
    throw std::invalid_argument("inner: location mismatch");
  double s = 0.0;
  if (f.location == Location::Cell) {
    for (std::size_t k = 0; k < f.values.size(); ++k) s += f.values[k] * g.values[k];
    return s * f.mesh.cell_volume();
  }
  for (std::size_t k = 0; k < f.values.size(); ++k)
    s += f.mesh.node_weight(k) * f.values[k] * g.values[k];
  return s;
}

double inner(const VectorField &p, const VectorField &q) {
  require_same_mesh(p.mesh, q.mesh, "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) s += dot(p.values[k], q.values[k]);
  return s * p.mesh.cell_volume();
}

double l2_norm(const ScalarField &f) { return std::sqrt(std::max(0.0, inner(f, f))); }
double l2_norm(const VectorField &q) { return std::sqrt(std::max(0.0, inner(q, q))); }
double h1_seminorm(const ScalarField &y) { return l2_norm(gradient(y)); }

struct HelmholtzSolver::Factor {
  detail::BandedSpd matrix;
};

HelmholtzSolver::HelmholtzSolver(const Mesh &mesh, double b) : mesh_(mesh), b_(b) {
  if (!(b >= 0.0) || !std::isfinite(b))
    throw std::invalid_argument("helmholtz: b must be finite and nonnegative");
  std::vector<std::size_t> pos(mesh.node_count());
  for (std::size_t k = 0; k < pos.size(); ++k) pos[k] = mesh.interior_position(k);
  const std::size_t bw = mesh.dimension() == 1 ? 1 : static_cast<std::size_t>(mesh.cells_per_axis());
  auto A = assemble_stiffness(mesh, pos, mesh.interior_nodes().size(), bw,
                              1.0 / mesh.cell_volume(), b);
  A.factor();
  factor_ = std::make_unique<Factor>(Factor{std::move(A)});
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver &&) noexcept = default;
HelmholtzSolver &HelmholtzSolver::operator=(HelmholtzSolver &&) noexcept = default;

void HelmholtzSolver::solve_interior(std::span<double> rhs_in_out) const {
  if (rhs_in_out.size() != mesh_.interior_nodes().size())
    throw std::invalid_argument("helmholtz: wrong number of interior unknowns");
  factor_->matrix.solve(rhs_in_out);
}

ScalarField HelmholtzSolver::solve(const ScalarField &rhs) const {
  require_nodal(rhs, "helmholtz_solve");
  require_same_mesh(mesh_, rhs.mesh, "helmholtz_solve");
  const auto &interior = mesh_.interior_nodes();
  std::vector<double> x(interior.size());
  for (std::size_t p = 0; p < interior.size(); ++p) {
    x[p] = rhs.values[interior[p]];
    if (!std::isfinite(x[p])) throw std::invalid_argument("helmholtz_solve: non-finite rhs");
  }
  factor_->matrix.solve(x);
  ScalarField y = ScalarField::zeros(mesh_);
  for (std::size_t p = 0; p < interior.size(); ++p) y.values[interior[p]] = x[p];
  return y;
}

ScalarField helmholtz_solve(double b, const ScalarField &rhs) {
  return HelmholtzSolver(rhs.mesh, b).solve(rhs);
}

struct GradientLeastSquares::Impl {
  Mesh mesh;
  std::vector<std::size_t> pos;
  std::vector<std::size_t> unknown_nodes;
  detail::BandedSpd matrix;
};

GradientLeastSquares::GradientLeastSquares(const Mesh &mesh, bool dirichlet) {
  std::vector<std::size_t> pos(mesh.node_count(), Mesh::npos);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < mesh.node_count(); ++k) {
    bool drop;
    if (dirichlet) {
      drop = mesh.is_dirichlet(k);
    } else {
      drop = k == 0 || (mesh.dimension() == 2 && k == 1);
    }
    if (drop) continue;
    pos[k] = nodes.size();
    nodes.push_back(k);
  }
  const std::size_t n = static_cast<std::size_t>(mesh.cells_per_axis());
  const std::size_t bw = mesh.dimension() == 1 ? 1 : n + 2;
  auto A = assemble_stiffness(mesh, pos, nodes.size(), bw, 1.0, 0.0);
  A.factor();
  impl_ = std::make_unique<Impl>(Impl{mesh, std::move(pos), std::move(nodes), std::move(A)});
}

GradientLeastSquares::~GradientLeastSquares() = default;
GradientLeastSquares::GradientLeastSquares(GradientLeastSquares &&) noexcept = default;
GradientLeastSquares &GradientLeastSquares::operator=(GradientLeastSquares &&) noexcept = default;

ScalarField GradientLeastSquares::potential(const VectorField &g) const {
  require_same_mesh(impl_->mesh, g.mesh, "potential");
  // Normal equations: K y = G^T W g = -h^N divergence_full(g).
  const ScalarField rhs = divergence_full(g);
  const double vol = impl_->mesh.cell_volume();
  std::vector<double> x(impl_->unknown_nodes.size());
  for (std::size_t p = 0; p < x.size(); ++p) x[p] = -vol * rhs.values[impl_->unknown_nodes[p]];
  impl_->matrix.solve(x);
  ScalarField y = ScalarField::zeros(impl_->mesh);
  for (std::size_t p = 0; p < x.size(); ++p) y.values[impl_->unknown_nodes[p]] = x[p];
  return y;
}

void write_field_csv(std::ostream &os, const ScalarField &f) {
  const Mesh &m = f.mesh;
  os << (m.dimension() == 1 ? "index,x,value\n" : "index,x,y,value\n");
  os << std::setprecision(17);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const Vec2 p = f.location == Location::Node ? m.node_coords(k) : m.cell_center(k);
    os << k << ',' << p.x;
    if (m.dimension() == 2) os << ',' << p.y;
    os << ',' << f.values[k] << '\n';
  }
}

}  // namespace qlc
