#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "qlcontrol/grid.hpp"

using namespace qlc;

namespace {

ScalarField random_interior(const Mesh &m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f = ScalarField::zeros(m);
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!m.is_dirichlet(k)) f[k] = d(rng);
  return f;
}

VectorField random_cells(const Mesh &m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VectorField q = VectorField::zeros(m);
  for (auto &v : q.values) v = {d(rng), m.dimension() == 2 ? d(rng) : 0.0};
  return q;
}

}  // namespace

TEST(Mesh, CountsAndIndexing) {
  const Mesh m1 = build_mesh(1, 8);
  EXPECT_EQ(m1.node_count(), 9u);
  EXPECT_EQ(m1.cell_count(), 8u);
  EXPECT_DOUBLE_EQ(m1.h(), 0.125);
  EXPECT_EQ(m1.interior_nodes().size(), 7u);
  EXPECT_TRUE(m1.is_dirichlet(0));
  EXPECT_TRUE(m1.is_dirichlet(8));
  EXPECT_FALSE(m1.is_dirichlet(4));

  const Mesh m2 = build_mesh(2, 4);
  EXPECT_EQ(m2.node_count(), 25u);
  EXPECT_EQ(m2.cell_count(), 16u);
  EXPECT_EQ(m2.interior_nodes().size(), 9u);
  const auto nodes = m2.cell_nodes(m2.cell_index(1, 2));
  EXPECT_EQ(nodes[0], m2.node_index(1, 2));
  EXPECT_EQ(nodes[1], m2.node_index(2, 2));
  EXPECT_EQ(nodes[2], m2.node_index(1, 3));
  EXPECT_EQ(nodes[3], m2.node_index(2, 3));
  EXPECT_EQ(m2.interior_position(0), Mesh::npos);
}

TEST(Mesh, RejectsDegenerateSizes) {
  EXPECT_THROW(build_mesh(1, 1), MeshError);
  EXPECT_THROW(build_mesh(3, 4), MeshError);
  EXPECT_THROW(build_mesh(0, 4), MeshError);
}

TEST(Mesh, TrapezoidWeightsIntegrateOne) {
  for (int d : {1, 2}) {
    const Mesh m = build_mesh(d, 6);
    double s = 0.0;
    for (std::size_t k = 0; k < m.node_count(); ++k) s += m.node_weight(k);
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
}

TEST(Gradient, ExactOnAffineFunctions) {
  const Mesh m1 = build_mesh(1, 10);
  const auto g1 = gradient(ScalarField::from_function(m1, [](Vec2 x) { return 3.0 * x.x - 1.0; }));
  for (const auto &v : g1.values) {
    EXPECT_NEAR(v.x, 3.0, 1e-12);
    EXPECT_EQ(v.y, 0.0);
  }
  const Mesh m2 = build_mesh(2, 5);
  const auto g2 = gradient(ScalarField::from_function(m2, [](Vec2 x) { return 2.0 * x.x - 0.5 * x.y; }));
  for (const auto &v : g2.values) {
    EXPECT_NEAR(v.x, 2.0, 1e-12);
    EXPECT_NEAR(v.y, -0.5, 1e-12);
  }
}

TEST(Gradient, KernelOnFullMesh) {
  const Mesh m2 = build_mesh(2, 4);
  ScalarField chk = ScalarField::zeros(m2);
  for (int j = 0; j <= 4; ++j)
    for (int i = 0; i <= 4; ++i) chk[m2.node_index(i, j)] = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  EXPECT_LT(l2_norm(gradient(chk)), 1e-14);
  EXPECT_LT(l2_norm(gradient(ScalarField::constant(m2, 2.5))), 1e-14);
}

TEST(Gradient, SummationByParts) {
  for (int d : {1, 2}) {
    const Mesh m = build_mesh(d, 7);
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const ScalarField z = random_interior(m, s);
      const VectorField q = random_cells(m, 100 + s);
      EXPECT_NEAR(inner(divergence_weak(q), z), -inner(q, gradient(z)), 1e-12);
    }
  }
}

TEST(Gradient, NodeCellTransfersAreAdjoint) {
  for (int d : {1, 2}) {
    const Mesh m = build_mesh(d, 5);
    const ScalarField z = random_interior(m, 3);
    ScalarField c = ScalarField::zeros(m, Location::Cell);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double &v : c.values) v = u(rng);
    double lhs = 0.0, rhs = 0.0;
    const ScalarField zc = node_to_cell(z), cn = cell_to_node(c);
    for (std::size_t k = 0; k < c.size(); ++k) lhs += zc[k] * c[k];
    for (std::size_t k = 0; k < z.size(); ++k) rhs += z[k] * cn[k];
    EXPECT_NEAR(lhs, rhs, 1e-13);
  }
}

TEST(Gradient, LaplacianMatchesThreePointStencil) {
  const Mesh m = build_mesh(1, 9);
  const ScalarField y = random_interior(m, 4);
  const ScalarField L = neg_laplacian(y);
  const double h = m.h();
  for (int i = 1; i < 9; ++i)
    EXPECT_NEAR(L[i], (-y[i - 1] + 2.0 * y[i] - y[i + 1]) / (h * h), 1e-9);
  EXPECT_EQ(L[0], 0.0);
  EXPECT_EQ(L[9], 0.0);
}

TEST(Helmholtz, SecondOrderAgainstClosedForm) {
  // Error ratios between successive refinements approach 4.
  for (double b : {0.5, 1.0, 4.0}) {
    std::vector<double> err;
    for (int n : {16, 32, 64, 128}) {
      const Mesh m = build_mesh(1, n);
      const ScalarField y = helmholtz_solve(b, ScalarField::constant(m, 1.0));
      double e = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k)
        e = std::max(e, std::abs(y[k] - oracle::helmholtz_constant_solution(b, m.node_coords(k).x)));
      err.push_back(e);
    }
    for (std::size_t r = 1; r < err.size(); ++r) {
      const double ratio = err[r - 1] / err[r];
      EXPECT_GT(ratio, 3.5) << "b=" << b;
      EXPECT_LT(ratio, 4.5) << "b=" << b;
    }
  }
}

TEST(Helmholtz, ResidualVanishes) {
  for (int d : {1, 2}) {
    const Mesh m = build_mesh(d, 8);
    const ScalarField f = random_interior(m, 5);
    const HelmholtzSolver hs(m, 2.0);
    const ScalarField y = hs.solve(f);
    EXPECT_TRUE(y.vanishes_on_boundary());
    const ScalarField r = neg_laplacian(y) + 2.0 * y - f;
    for (std::size_t k : m.interior_nodes()) EXPECT_NEAR(r[k], 0.0, 1e-10);
  }
}

TEST(Helmholtz, PoissonExactForQuadratics) {
  // The three-point stencil is exact on x(1-x)/2.
  const Mesh m = build_mesh(1, 12);
  const ScalarField y = helmholtz_solve(0.0, ScalarField::constant(m, 1.0));
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double x = m.node_coords(k).x;
    EXPECT_NEAR(y[k], 0.5 * x * (1.0 - x), 1e-13);
  }
}

TEST(GradientLeastSquares, RecoversPotentials) {
  for (int d : {1, 2}) {
    const Mesh m = build_mesh(d, 6);
    const ScalarField z = random_interior(m, 8);
    const ScalarField p = GradientLeastSquares(m, true).potential(gradient(z));
    for (std::size_t k = 0; k < z.size(); ++k) EXPECT_NEAR(p[k], z[k], 1e-10);
    // Free potential agrees up to the kernel of the gradient.
    const ScalarField pf = GradientLeastSquares(m, false).potential(gradient(z));
    EXPECT_LT(l2_norm(gradient(pf) - gradient(z)), 1e-10);
  }
}

TEST(Fields, MismatchedMeshesThrow) {
  const ScalarField a = ScalarField::zeros(build_mesh(1, 4));
  const ScalarField b = ScalarField::zeros(build_mesh(1, 5));
  EXPECT_THROW(a + b, std::invalid_argument);
  EXPECT_THROW(inner(a, b), std::invalid_argument);
}

TEST(Fields, CsvHasOneRowPerNode) {
  const Mesh m = build_mesh(1, 4);
  std::ostringstream os;
  write_field_csv(os, ScalarField::constant(m, 1.0));
  std::size_t lines = 0;
  for (char c : os.str()) lines += (c == '\n');
  EXPECT_EQ(lines, 6u);
}
