#include "stretchlab/mesh.h"
#include "test_util.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace stretchlab {
namespace {

constexpr double kFourPi = 4 * std::numbers::pi;

class MeshTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sigma_ = new SurfaceGroupRep(octagon_representation());
    for (int l = 0; l <= 3; ++l) meshes_[l] = new FundamentalMesh(build_octagon_mesh(*sigma_, l));
  }
  static void TearDownTestSuite() {
    for (auto*& m : meshes_) delete m;
    delete sigma_;
  }
  static const FundamentalMesh& mesh(int level) { return *meshes_[level]; }
  static const SurfaceGroupRep& sigma() { return *sigma_; }

  static inline SurfaceGroupRep* sigma_ = nullptr;
  static inline FundamentalMesh* meshes_[4] = {};
};

TEST_F(MeshTest, TriangleCountsAndArea) {
  for (int l = 0; l <= 3; ++l) {
    EXPECT_EQ(mesh(l).triangles.size(), static_cast<std::size_t>(8 << (2 * l)));
    EXPECT_EQ(mesh(l).level, l);
  }
  EXPECT_LE(std::abs(mesh(3).total_area() - kFourPi), 0.01 * kFourPi);
  // geodesic triangles tile the octagon exactly, so there is no
  // discretization error in the area at any level
  for (int l = 0; l <= 3; ++l) EXPECT_NEAR(mesh(l).total_area(), kFourPi, 1e-12);
}

TEST_F(MeshTest, Invariants) {
  for (int l = 0; l <= 3; ++l) {
    const FundamentalMesh& m = mesh(l);
    EXPECT_LE(m.pairing_defect(), 1e-10);
    EXPECT_GE(m.min_angle(), 15.0 * std::numbers::pi / 180);
    for (const auto& v : m.vertices) EXPECT_TRUE(on_hyperboloid(v, 1e-12));
    for (std::size_t t = 0; t < m.triangles.size(); ++t) EXPECT_GT(m.areas[t], 0.0);
  }
  // vertex words reproduce the copies
  const FundamentalMesh& m = mesh(2);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const MinkVec rep = m.vertices[m.class_rep[m.vertex_class[v]]];
    EXPECT_LE((evaluate(m.vertex_word[v], sigma()) * rep - m.vertices[v]).norm(), 1e-9);
  }
  // genus 2 quotient: V - E + F = -2
  int canonical_edges = 0;
  for (const auto& e : m.edges) canonical_edges += e.canonical;
  EXPECT_EQ(m.num_classes() - canonical_edges + static_cast<int>(m.triangles.size()), -2);
  EXPECT_THROW(build_octagon_mesh(sigma(), -1), std::invalid_argument);
}

TEST_F(MeshTest, TriangleGeometry) {
  const MinkVec a = apex();
  const MinkVec b = geodesic(a, MinkVec(1, 0, 0), 0.5);
  const MinkVec c = geodesic(a, MinkVec(0, 1, 0), 0.5);
  EXPECT_NEAR(vertex_angle(a, b, c), std::numbers::pi / 2, 1e-12);
  // Gauss-Bonnet for a geodesic triangle
  const double sum = vertex_angle(a, b, c) + vertex_angle(b, c, a) + vertex_angle(c, a, b);
  EXPECT_NEAR(triangle_area(a, b, c), std::numbers::pi - sum, 1e-12);
  EXPECT_THROW(vertex_angle(a, a, c), GeometryError);
}

TEST_F(MeshTest, MaurerCartan) {
  const FundamentalMesh& m = mesh(3);
  const DiscreteOneForm mc = maurer_cartan(m);
  for (std::size_t e = 0; e < m.edges.size(); e += 37) {
    const MinkVec& xa = m.vertices[m.edges[e].a];
    const MinkVec& xb = m.vertices[m.edges[e].b];
    // unit-speed geodesic from a to b: generator h B
    const MinkVec v = log_map(xa, xb);
    const double h = std::sqrt(mink_dot(v, v));
    const LieAlg expected = h * cross(v / h, xa);
    // midpoint rule: relative error h^2 / 24 on a geodesic edge
    EXPECT_LE((mc.values[e] - expected).norm(), h * h / 12 * expected.norm());
    EXPECT_TRUE(is_lie_algebra(mc.values[e].m, 1e-10));
  }
  // edge along (0,1,0) at the apex
  const double h = 0.01;
  const MinkVec y = geodesic(apex(), MinkVec(0, 1, 0), h);
  // exactly 2 sinh(h/2) B
  const LieAlg mc0 = cross(y - apex(), normalize_hyperboloid(y + apex()));
  EXPECT_LE((mc0 - 2 * std::sinh(h / 2) * std_b()).norm(), 1e-15);
  EXPECT_LE((mc0 - h * std_b()).norm(), 1.1 * std::sqrt(2.0) * h * h * h / 24);
  EXPECT_EQ(cross(apex() - apex(), apex()).norm(), 0.0);
}

TEST_F(MeshTest, ExactFormsAreClosed) {
  const FundamentalMesh& m = mesh(2);
  std::vector<LieAlg> f;
  for (const auto& v : m.vertices) f.push_back(rotation_generator(v));
  EXPECT_LE(closedness_residual(m, exact_form(m, f, sigma())), 1e-14);
  EXPECT_EQ(closedness_residual(m, DiscreteOneForm::zero(m, FormKind::kPrimal, sigma())), 0.0);
  std::mt19937_64 rng(53);
  DiscreteOneForm r = DiscreteOneForm::zero(m, FormKind::kPrimal, sigma());
  for (auto& v : r.values) v = testing::random_lie(rng);
  EXPECT_GT(closedness_residual(m, r), 0.05);
}

TEST_F(MeshTest, LoopIntegrals) {
  const FundamentalMesh& m = mesh(2);
  const DiscreteOneForm zero = DiscreteOneForm::zero(m, FormKind::kPrimal, sigma());
  for (int g = 0; g < 4; ++g) EXPECT_EQ(loop_integral(m, zero, Word::generator(g)).norm(), 0.0);

  // exact form of an equivariant function recovers its coboundary
  std::vector<LieAlg> f;
  for (const auto& v : m.vertices) f.push_back(rotation_generator(v));
  const DiscreteOneForm df = exact_form(m, f, sigma());
  const Cocycle ex = extract_cocycle(m, df);
  const Cocycle oracle = -1.0 * coboundary(f[0], sigma());
  for (int g = 0; g < 4; ++g) {
    EXPECT_LE((ex.values[g] - oracle.values[g]).norm(), 1e-9 * std::max(1.0, oracle.values[g].norm()));
  }
  // the relator loop closes up for closed forms, up to the rounding of
  // sigma(relator) in plain double products
  EXPECT_LE(loop_integral(m, df, Word::relator()).norm(),
            100 * sigma().plain_relator_residual() * (1 + f[0].norm()));
  EXPECT_THROW(loop_integral(m, df, Word(), -1), std::out_of_range);
}

TEST_F(MeshTest, RotationGeneratorEquivariant) {
  std::mt19937_64 rng(59);
  EXPECT_LE((rotation_generator(apex()) - std_n_hat()).norm(), 1e-15);
  for (int i = 0; i < 10; ++i) {
    const GroupElem g = testing::random_group(rng, 0.7);
    const MinkVec x = testing::random_point(rng, 1.0);
    EXPECT_LE((rotation_generator(g * x) - adjoint(g, rotation_generator(x))).norm(),
              1e-10 * g.m.squaredNorm() * x.squaredNorm());
  }
}

TEST_F(MeshTest, WedgePair) {
  const FundamentalMesh& m = mesh(2);
  std::mt19937_64 rng(61);
  const LieAlg a = testing::random_lie(rng), c = testing::random_lie(rng);
  std::vector<LieAlg> fx, fy;
  for (const auto& v : m.vertices) {
    fx.push_back(v(0) * a);
    fy.push_back(v(1) * c);
  }
  const DiscreteOneForm phi = exact_form(m, fx, sigma());
  const DiscreteOneForm psi = exact_form(m, fy, sigma());
  EXPECT_EQ(wedge_pair(m, phi, phi), 0.0);
  EXPECT_EQ(wedge_pair(m, phi, psi), -wedge_pair(m, psi, phi));
  DiscreteOneForm phi2 = phi;
  for (auto& v : phi2.values) v *= 3.0;
  EXPECT_NEAR(wedge_pair(m, phi2, psi), 3 * wedge_pair(m, phi, psi), 1e-12);

  // quadrature oracle: for piecewise-linear x, y the integral of dx ^ dy is
  // the signed area of the projected triangles, so
  // 1/2 int (A dx) ^ (C dy) = 1/2 (A, C) area_xy.
  double area_xy = 0;
  for (const auto& t : m.triangles) {
    const MinkVec& p = m.vertices[t[0]];
    const MinkVec& q = m.vertices[t[1]];
    const MinkVec& r = m.vertices[t[2]];
    area_xy += 0.5 * ((q(0) - p(0)) * (r(1) - p(1)) - (r(0) - p(0)) * (q(1) - p(1)));
  }
  EXPECT_NEAR(wedge_pair(m, phi, psi), 0.5 * killing(a, c) * area_xy,
              1e-10 * std::max(1.0, std::abs(killing(a, c) * area_xy)));
}

}  // namespace
}  // namespace stretchlab
