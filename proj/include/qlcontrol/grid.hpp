#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlc {

/// Point or gradient in R^N, N <= 2. In 1D the second component is always 0.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 &operator+=(const Vec2 &o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 &operator-=(const Vec2 &o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2 &operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2 &a) { return dot(a, a); }

class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform structured mesh of (0,1) or (0,1)^2.
///
/// Nodes carry states and controls, cells carry gradients and coefficients.
/// Nodes are numbered row-major (x fastest); cell c = i + j*n has lower-left
/// node (i, j). Every node on the boundary of the domain is Dirichlet.
class Mesh {
 public:
  Mesh() = default;
  Mesh(int dimension, int cells_per_axis);

  int dimension() const { return dim_; }
  int cells_per_axis() const { return n_; }
  int nodes_per_axis() const { return n_ + 1; }
  double h() const { return h_; }
  std::size_t node_count() const;
  std::size_t cell_count() const;
  /// h^N
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  /// Number of corners of a cell (2^N).
  int corners() const { return dim_ == 1 ? 2 : 4; }

  std::size_t node_index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * (n_ + 1);
  }
  std::size_t cell_index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n_;
  }
  bool is_dirichlet(std::size_t node) const;
  Vec2 node_coords(std::size_t node) const;
  Vec2 cell_center(std::size_t cell) const;
  /// Corner nodes of a cell: (i,j), (i+1,j), (i,j+1), (i+1,j+1); only the
  /// first two are meaningful in 1D.
  std::array<std::size_t, 4> cell_nodes(std::size_t cell) const;
  /// Trapezoid quadrature weight of a node.
  double node_weight(std::size_t node) const;
  /// Interior node ids in increasing order.
  const std::vector<std::size_t> &interior_nodes() const { return interior_; }
  /// Position of a node among interior nodes, or npos for Dirichlet nodes.
  std::size_t interior_position(std::size_t node) const { return interior_pos_[node]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const Mesh &a, const Mesh &b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }

 private:
  int dim_ = 1;
  int n_ = 2;
  double h_ = 0.5;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> interior_pos_;
};

/// Reject cells_per_axis < 2 and dimensions other than 1, 2.
Mesh build_mesh(int dimension, int cells_per_axis);

enum class Location { Node, Cell };

struct ScalarField {
  Mesh mesh;
  Location location = Location::Node;
  std::vector<double> values;

  static ScalarField zeros(const Mesh &m, Location loc = Location::Node);
  static ScalarField constant(const Mesh &m, double v, Location loc = Location::Node);
  template <class Fn>
  static ScalarField from_function(const Mesh &m, Fn &&fn) {
    ScalarField f = zeros(m);
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = fn(m.node_coords(k));
    return f;
  }

  std::size_t size() const { return values.size(); }
  double &operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
  /// True when every Dirichlet node holds exactly zero.
  bool vanishes_on_boundary() const;
  double max_abs() const;
};

struct VectorField {
  Mesh mesh;
  std::vector<Vec2> values;

  static VectorField zeros(const Mesh &m);
  static VectorField constant(const Mesh &m, Vec2 v);
  std::size_t size() const { return values.size(); }
  Vec2 &operator[](std::size_t k) { return values[k]; }
  const Vec2 &operator[](std::size_t k) const { return values[k]; }
};

// Pointwise arithmetic for fields on matching meshes / locations.
ScalarField operator+(const ScalarField &a, const ScalarField &b);
ScalarField operator-(const ScalarField &a, const ScalarField &b);
ScalarField operator*(double s, const ScalarField &a);
VectorField operator-(const VectorField &a, const VectorField &b);

/// Per-cell difference quotient of a nodal field. In 2D each component is
/// the average of the two opposing face difference quotients.
VectorField gradient(const ScalarField &y);

/// Negative adjoint of `gradient` with respect to the discrete inner
/// products: inner(divergence_weak(q), z) = -inner(q, gradient(z)) for all z
/// vanishing on Dirichlet nodes. Dirichlet entries of the result are zero.
ScalarField divergence_weak(const VectorField &q);

/// Same as divergence_weak but over every node (the adjoint for fields that
/// do not vanish on the boundary, relative to the unweighted h^N node sum).
ScalarField divergence_full(const VectorField &q);

/// Discrete -Laplacian of a nodal field at the interior nodes.
ScalarField neg_laplacian(const ScalarField &y);

/// Average of a nodal field over the corners of each cell.
ScalarField node_to_cell(const ScalarField &nodal);
/// Adjoint of node_to_cell on interior nodes: a cell field seen as a nodal
/// load, (1/2^N) * sum of adjacent cell values. Dirichlet entries are zero.
ScalarField cell_to_node(const ScalarField &cell);

double inner(const ScalarField &f, const ScalarField &g);
double inner(const VectorField &p, const VectorField &q);
double l2_norm(const ScalarField &f);
double l2_norm(const VectorField &q);
double h1_seminorm(const ScalarField &y);

/// Direct solver for (-Delta_h + b) y = rhs with zero Dirichlet data.
///
/// The factorization is computed once in the constructor; solve() is const
/// and can be called concurrently.
class HelmholtzSolver {
 public:
  HelmholtzSolver(const Mesh &mesh, double b);
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver &&) noexcept;
  HelmholtzSolver &operator=(HelmholtzSolver &&) noexcept;

  /// rhs is read on interior nodes only; output vanishes on the boundary.
  ScalarField solve(const ScalarField &rhs) const;
  /// Raw interface on interior unknowns (ordered as Mesh::interior_nodes).
  void solve_interior(std::span<double> rhs_in_out) const;
  double b() const { return b_; }
  const Mesh &mesh() const { return mesh_; }

 private:
  struct Factor;
  Mesh mesh_;
  double b_;
  std::unique_ptr<Factor> factor_;
};

ScalarField helmholtz_solve(double b, const ScalarField &rhs);

/// Least-squares potential: minimizes ||gradient(y) - g||_{L2} over nodal y.
/// With `dirichlet` the potential vanishes on the boundary; otherwise it is
/// free and the gauge is fixed by pinning one node (two in 2D, where the
/// averaged gradient also annihilates the checkerboard mode).
class GradientLeastSquares {
 public:
  GradientLeastSquares(const Mesh &mesh, bool dirichlet);
  ~GradientLeastSquares();
  GradientLeastSquares(GradientLeastSquares &&) noexcept;
  GradientLeastSquares &operator=(GradientLeastSquares &&) noexcept;

  ScalarField potential(const VectorField &g) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// CSV dump `index,x[,y],value`, one row per entry in index order.
void write_field_csv(std::ostream &os, const ScalarField &f);

/// Throws std::invalid_argument when the meshes differ.
void require_same_mesh(const Mesh &a, const Mesh &b, const char *what);

}  // namespace qlc
