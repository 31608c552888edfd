#include "mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

namespace iopeg {

Vec2 FacetRecord::midpoint(const std::vector<Vec2>& vertices) const {
  const auto& a = vertices[static_cast<std::size_t>(endpoints[0])];
  const auto& b = vertices[static_cast<std::size_t>(endpoints[1])];
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

Vec2 CellGeometry::pull_back(const Vec2& x) const {
  const Vec2 d{x[0] - origin[0], x[1] - origin[1]};
  // xhat = B^{-1} d, and B^{-1} is the transpose of the stored B^{-T}.
  return {inverse_transpose[0][0] * d[0] + inverse_transpose[1][0] * d[1],
          inverse_transpose[0][1] * d[0] + inverse_transpose[1][1] * d[1]};
}

CellGeometry make_cell_geometry(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  CellGeometry g;
  g.origin = p0;
  g.jacobian = {{{p1[0] - p0[0], p2[0] - p0[0]}, {p1[1] - p0[1], p2[1] - p0[1]}}};
  const auto& B = g.jacobian;
  g.det = B[0][0] * B[1][1] - B[0][1] * B[1][0];
  g.abs_det = std::abs(g.det);
  const double scale = std::max({std::abs(B[0][0]), std::abs(B[0][1]), std::abs(B[1][0]),
                                 std::abs(B[1][1])});
  require(scale > 0.0 && g.abs_det > 1e-14 * scale * scale, ErrorCode::DegenerateCell,
          "degenerate cell: zero area");
  const double inv = 1.0 / g.det;
  // B^{-1} = inv * [[B11, -B01], [-B10, B00]]; store its transpose.
  g.inverse_transpose = {{{B[1][1] * inv, -B[1][0] * inv}, {-B[0][1] * inv, B[0][0] * inv}}};
  return g;
}

Index TriMesh::num_boundary_facets() const {
  return std::count_if(facets_.begin(), facets_.end(),
                       [](const FacetRecord& f) { return !f.interior(); });
}

CellGeometry TriMesh::cell_geometry(Index cell) const {
  require(cell >= 0 && cell < num_cells(), ErrorCode::InvalidArgument, "cell index out of range");
  const auto& c = cells_[static_cast<std::size_t>(cell)];
  return make_cell_geometry(vertices_[static_cast<std::size_t>(c[0])],
                            vertices_[static_cast<std::size_t>(c[1])],
                            vertices_[static_cast<std::size_t>(c[2])]);
}

double TriMesh::cell_area(Index cell) const { return 0.5 * cell_geometry(cell).abs_det; }

double TriMesh::cell_diameter(Index cell) const {
  double d = 0.0;
  for (Index f : cell_to_facets_[static_cast<std::size_t>(cell)])
    d = std::max(d, facets_[static_cast<std::size_t>(f)].length);
  return d;
}

Vec2 TriMesh::cell_centroid(Index cell) const {
  const auto& c = cells_[static_cast<std::size_t>(cell)];
  Vec2 x{0.0, 0.0};
  for (Index v : c) {
    x[0] += vertices_[static_cast<std::size_t>(v)][0] / 3.0;
    x[1] += vertices_[static_cast<std::size_t>(v)][1] / 3.0;
  }
  return x;
}

Vec2 TriMesh::outward_normal(Index facet, Index cell) const {
  const auto& f = facets_[static_cast<std::size_t>(facet)];
  if (f.cell_plus == cell) return f.normal;
  require(f.cell_minus && *f.cell_minus == cell, ErrorCode::InvalidArgument,
          "cell does not own facet");
  return {-f.normal[0], -f.normal[1]};
}

int TriMesh::local_facet(Index cell, Index facet) const {
  const auto& cf = cell_to_facets_[static_cast<std::size_t>(cell)];
  for (int l = 0; l < 3; ++l)
    if (cf[static_cast<std::size_t>(l)] == facet) return l;
  throw Error(ErrorCode::InvalidArgument, "facet is not on cell");
}

std::vector<Index> TriMesh::vertex_neighbours(Index cell) const {
  // Structured mesh: neighbours sit within one square of the owning square,
  // but a plain scan over the vertex star keeps this independent of layout.
  std::set<Index> out;
  const auto& c = cells_[static_cast<std::size_t>(cell)];
  for (Index t = 0; t < num_cells(); ++t) {
    if (t == cell) continue;
    const auto& o = cells_[static_cast<std::size_t>(t)];
    for (Index v : c)
      if (std::find(o.begin(), o.end(), v) != o.end()) {
        out.insert(t);
        break;
      }
  }
  return {out.begin(), out.end()};
}

void TriMesh::write(std::ostream& os) const {
  os.precision(17);
  for (const auto& v : vertices_) os << "v " << v[0] << ' ' << v[1] << '\n';
  for (const auto& c : cells_) os << "c " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (const auto& f : facets_)
    os << "f " << f.endpoints[0] << ' ' << f.endpoints[1] << ' ' << static_cast<int>(f.cls)
       << '\n';
}

TriMesh build_structured_mesh(Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "subdivision count must be >= 1");
  TriMesh m;
  m.n_ = n;
  const Index nv1 = n + 1;
  m.vertices_.reserve(static_cast<std::size_t>(nv1 * nv1));
  for (Index j = 0; j <= n; ++j)
    for (Index i = 0; i <= n; ++i)
      m.vertices_.push_back({static_cast<double>(i) / static_cast<double>(n),
                             static_cast<double>(j) / static_cast<double>(n)});
  auto vid = [nv1](Index i, Index j) { return j * nv1 + i; };
  m.cells_.reserve(static_cast<std::size_t>(2 * n * n));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Index v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1),
                  v01 = vid(i, j + 1);
      m.cells_.push_back({v00, v10, v11});
      m.cells_.push_back({v00, v11, v01});
    }

  std::map<std::pair<Index, Index>, Index> edge_ids;
  m.cell_to_facets_.resize(m.cells_.size());
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto& cv = m.cells_[static_cast<std::size_t>(c)];
    for (int l = 0; l < 3; ++l) {
      const Index a = cv[static_cast<std::size_t>((l + 1) % 3)];
      const Index b = cv[static_cast<std::size_t>((l + 2) % 3)];
      const auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      Index id;
      if (it == edge_ids.end()) {
        id = static_cast<Index>(m.facets_.size());
        edge_ids.emplace(key, id);
        FacetRecord f;
        // a -> b runs counter-clockwise around cell_plus, so rotating the
        // tangent clockwise gives its outward normal.
        f.endpoints = {a, b};
        f.cell_plus = c;
        const auto& pa = m.vertices_[static_cast<std::size_t>(a)];
        const auto& pb = m.vertices_[static_cast<std::size_t>(b)];
        const Vec2 t{pb[0] - pa[0], pb[1] - pa[1]};
        f.length = norm(t);
        f.normal = {t[1] / f.length, -t[0] / f.length};
        m.facets_.push_back(f);
      } else {
        id = it->second;
        auto& f = m.facets_[static_cast<std::size_t>(id)];
        f.cell_minus = c;
        f.cls = FacetClass::Interior;
      }
      m.cell_to_facets_[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)] = id;
    }
  }
  for (const auto& f : m.facets_) m.h_max_ = std::max(m.h_max_, f.length);
  return m;
}

TriMesh classify_facets(TriMesh mesh, const std::function<bool(const Vec2&)>& dirichlet) {
  for (auto& f : mesh.facets_) {
    if (f.interior()) continue;
    f.cls = dirichlet(f.midpoint(mesh.vertices_)) ? FacetClass::Dirichlet : FacetClass::Neumann;
  }
  return mesh;
}

}  // namespace iopeg
