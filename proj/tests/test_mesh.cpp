#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mesh.hpp"
#include "quadrature.hpp"

using namespace iopeg;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

class StructuredMesh : public ::testing::TestWithParam<Index> {};

TEST_P(StructuredMesh, EntityCounts) {
  const Index n = GetParam();
  const TriMesh m = build_structured_mesh(n);
  EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
  EXPECT_EQ(m.num_cells(), 2 * n * n);
  EXPECT_EQ(m.num_facets(), 3 * n * n + 2 * n);
  EXPECT_EQ(m.num_boundary_facets(), 4 * n);
}

TEST_P(StructuredMesh, DiagonalIsLongestEdge) {
  const Index n = GetParam();
  EXPECT_NEAR(build_structured_mesh(n).h_max(), std::sqrt(2.0) / static_cast<double>(n), 1e-15);
}

TEST_P(StructuredMesh, AreasTileTheSquare) {
  const TriMesh m = build_structured_mesh(GetParam());
  double total = 0.0;
  const double expected = 0.5 / static_cast<double>(GetParam() * GetParam());
  for (Index c = 0; c < m.num_cells(); ++c) {
    EXPECT_NEAR(m.cell_area(c), expected, 1e-15);
    EXPECT_GT(m.cell_geometry(c).det, 0.0) << "cell " << c << " is clockwise";
    total += m.cell_area(c);
  }
  EXPECT_NEAR(total, 1.0, 1e-13);
}

TEST_P(StructuredMesh, NormalsAreUnitAndPointOutOfThePlusCell) {
  const TriMesh m = build_structured_mesh(GetParam());
  for (Index f = 0; f < m.num_facets(); ++f) {
    const auto& rec = m.facets()[f];
    const Vec2 n = rec.normal;
    EXPECT_NEAR(norm(n), 1.0, 1e-14);
    const Vec2 a = m.vertices()[rec.endpoints[0]], b = m.vertices()[rec.endpoints[1]];
    EXPECT_NEAR(rec.length, std::hypot(b[0] - a[0], b[1] - a[1]), 1e-15);
    EXPECT_NEAR(n[0] * (b[0] - a[0]) + n[1] * (b[1] - a[1]), 0.0, 1e-14);
    const Vec2 mid = rec.midpoint(m.vertices());
    const Vec2 c = m.cell_centroid(rec.cell_plus);
    EXPECT_GT(dot(n, {mid[0] - c[0], mid[1] - c[1]}), 0.0);
    if (rec.interior()) {
      const Vec2 nm = m.outward_normal(f, *rec.cell_minus);
      EXPECT_DOUBLE_EQ(nm[0], -n[0]);
      EXPECT_DOUBLE_EQ(nm[1], -n[1]);
    } else {
      const bool on_boundary = std::abs(mid[0]) < 1e-14 || std::abs(mid[0] - 1.0) < 1e-14 ||
                               std::abs(mid[1]) < 1e-14 || std::abs(mid[1] - 1.0) < 1e-14;
      EXPECT_TRUE(on_boundary);
      EXPECT_EQ(rec.cls, FacetClass::Dirichlet);
    }
  }
}

TEST_P(StructuredMesh, CellFacetIncidenceIsConsistent) {
  const TriMesh m = build_structured_mesh(GetParam());
  for (Index c = 0; c < m.num_cells(); ++c) {
    for (int l = 0; l < 3; ++l) {
      const Index f = m.cell_to_facets()[c][l];
      EXPECT_EQ(m.local_facet(c, f), l);
      const auto& rec = m.facets()[f];
      EXPECT_TRUE(rec.cell_plus == c || rec.cell_minus == c);
      // Facet l is opposite local vertex l.
      const Index opposite = m.cells()[c][l];
      EXPECT_NE(rec.endpoints[0], opposite);
      EXPECT_NE(rec.endpoints[1], opposite);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, StructuredMesh, ::testing::Values(1, 2, 3, 8));

TEST(Mesh, RejectsNonPositiveSubdivisions) {
  try {
    build_structured_mesh(0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Mesh, CollinearCellIsDegenerate) {
  try {
    make_cell_geometry({0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCell);
  }
}

TEST(Mesh, PullBackInvertsMap) {
  const CellGeometry g = make_cell_geometry({0.2, 0.1}, {0.9, 0.3}, {0.4, 0.8});
  const Vec2 ref{0.3, 0.25};
  const Vec2 back = g.pull_back(g.map(ref));
  EXPECT_NEAR(back[0], ref[0], 1e-14);
  EXPECT_NEAR(back[1], ref[1], 1e-14);
}

TEST(Mesh, ClassifyFacetsSplitsByMidpoint) {
  const TriMesh m =
      classify_facets(build_structured_mesh(4), [](const Vec2& x) { return x[0] < 1.0 - 1e-12; });
  Index neumann = 0;
  for (const auto& f : m.facets()) {
    if (f.cls != FacetClass::Neumann) continue;
    ++neumann;
    EXPECT_NEAR(f.midpoint(m.vertices())[0], 1.0, 1e-14);
  }
  EXPECT_EQ(neumann, 4);
}

TEST(Mesh, VertexNeighboursOfCornerAndInteriorCells) {
  const TriMesh m = build_structured_mesh(3);
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto nb = m.vertex_neighbours(c);
    std::set<Index> unique(nb.begin(), nb.end());
    EXPECT_EQ(unique.size(), nb.size());
    EXPECT_EQ(unique.count(c), 0u);
    for (Index o : nb) {
      bool shares = false;
      for (Index v : m.cells()[c])
        for (Index w : m.cells()[o]) shares = shares || v == w;
      EXPECT_TRUE(shares);
    }
  }
}

// Reference triangle: the integral of x^a y^b is a! b! / (a + b + 2)!.
class TriangleRule : public ::testing::TestWithParam<int> {};

TEST_P(TriangleRule, IntegratesMonomialsUpToItsDegree) {
  const int deg = GetParam();
  const QuadratureRule q = make_quadrature(deg, deg);
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.tri_points.size(); ++i)
        s += q.tri_weights[i] * std::pow(q.tri_points[i][0], a) * std::pow(q.tri_points[i][1], b);
      EXPECT_NEAR(s, factorial(a) * factorial(b) / factorial(a + b + 2), 1e-15)
          << "x^" << a << " y^" << b;
    }
  for (int m = 0; m <= deg; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.edge_points.size(); ++i)
      s += q.edge_weights[i] * std::pow(q.edge_points[i], m);
    EXPECT_NEAR(s, 1.0 / (m + 1), 1e-15);
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, TriangleRule, ::testing::Range(1, 13));

TEST(Quadrature, RejectsUnsupportedDegree) {
  EXPECT_THROW(make_quadrature(kMaxQuadratureDegree + 1, 2), Error);
}
