#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "qlcontrol/grid.hpp"

namespace qlc {

enum class MeasureClass { PH10, PH1, Unconstrained };

const char *to_string(MeasureClass c);

/// Per-cell finite probability measure on R^N with a fixed atom budget.
///
/// Atom k of cell c lives at index c * atoms_per_cell + k. Unused atoms carry
/// zero weight.
class YoungMeasureField {
 public:
  YoungMeasureField() = default;
  YoungMeasureField(Mesh mesh, std::size_t atoms_per_cell);

  const Mesh &mesh() const { return mesh_; }
  std::size_t atoms_per_cell() const { return k_; }
  std::size_t cell_count() const { return mesh_.cell_count(); }

  Vec2 &atom(std::size_t cell, std::size_t k) { return atoms_[cell * k_ + k]; }
  const Vec2 &atom(std::size_t cell, std::size_t k) const { return atoms_[cell * k_ + k]; }
  double &weight(std::size_t cell, std::size_t k) { return weights_[cell * k_ + k]; }
  double weight(std::size_t cell, std::size_t k) const { return weights_[cell * k_ + k]; }

  std::vector<Vec2> &atoms() { return atoms_; }
  const std::vector<Vec2> &atoms() const { return atoms_; }
  std::vector<double> &weights() { return weights_; }
  const std::vector<double> &weights() const { return weights_; }

  /// Class recorded by the constructor functions below (classify() recomputes).
  MeasureClass tag() const { return tag_; }
  void set_tag(MeasureClass t) { tag_ = t; }

  /// Largest |sum_k p_k - 1| or negative weight violation over cells.
  double normalization_error() const;

 private:
  Mesh mesh_;
  std::size_t k_ = 1;
  std::vector<Vec2> atoms_;
  std::vector<double> weights_;
  MeasureClass tag_ = MeasureClass::Unconstrained;
};

using Integrand = std::function<double(const Vec2 &)>;

/// One atom per cell at v(cell), weight 1. `atoms_per_cell` > 1 duplicates
/// the atom with zero weight on the copies.
YoungMeasureField dirac_field(const VectorField &v, std::size_t atoms_per_cell = 1);

/// Per-cell sum_k p_k psi(lambda_k). Throws on non-finite values.
ScalarField moment(const YoungMeasureField &ym, const Integrand &psi);
VectorField barycenter(const YoungMeasureField &ym);
/// sum_cells h^N sum_k p_k |lambda_k|^2.
double second_moment(const YoungMeasureField &ym);

/// Distance of a cell vector field from the range of `gradient` over the
/// chosen potential space, ||g - gradient(y*)||_{L2} for the least-squares y*.
double gradient_range_distance(const VectorField &g, bool dirichlet);
/// Tightest class of the barycenter field (tolerance 1e-10 (1 + ||bary||)).
MeasureClass classify(const YoungMeasureField &ym);

/// Shifts every cell's atoms by (grad y - barycenter) for the least-squares
/// potential y of the target space. Weights are unchanged.
YoungMeasureField project_class(const YoungMeasureField &ym, MeasureClass target);

/// Cellwise shift of all atoms so that the barycenter equals `target`.
YoungMeasureField shift_to_barycenter(const YoungMeasureField &ym, const VectorField &target);

/// Continuous piecewise-linear 1D function given by its breakpoints.
struct Laminate {
  std::vector<double> x;
  std::vector<double> value;

  double operator()(double t) const;
  std::size_t pieces() const { return x.empty() ? 0 : x.size() - 1; }
  double slope(std::size_t piece) const {
    return (value[piece + 1] - value[piece]) / (x[piece + 1] - x[piece]);
  }
  /// (1/|I|) int_I psi(u') over the interval I.
  double derivative_mean(double a, double b, const std::function<double(double)> &psi) const;
  /// Interpolates at the nodes of a (finer) 1D mesh.
  ScalarField sample(const Mesh &mesh) const;
};

/// j-th laminate of a 1D field with at most two atoms per cell: in every cell
/// the derivative takes the lower atom on a (1-theta) share and the upper
/// atom on a theta share of each of j periods. The result matches the
/// barycenter potential (starting at `offset` at x = 0) at cell endpoints.
Laminate realize_sequence(const YoungMeasureField &ym, int j, double offset = 0.0);

/// Potential of a 1D barycenter field: offset + running integral.
ScalarField barycenter_potential_1d(const YoungMeasureField &ym, double offset = 0.0);

/// CSV dump `cell,atom_index,lambda_x[,lambda_y],weight`.
void write_measure_csv(std::ostream &os, const YoungMeasureField &ym);

}  // namespace qlc
