#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "common.hpp"

namespace iopeg {

enum class FacetClass : int { Interior = 0, Dirichlet = 1, Neumann = 2 };

struct FacetRecord {
  std::array<Index, 2> endpoints{};
  Index cell_plus = -1;
  std::optional<Index> cell_minus;
  /// Outward unit normal of cell_plus.
  Vec2 normal{};
  double length = 0.0;
  FacetClass cls = FacetClass::Dirichlet;

  [[nodiscard]] bool interior() const { return cell_minus.has_value(); }
  [[nodiscard]] Vec2 midpoint(const std::vector<Vec2>& vertices) const;
};

/// Affine map x = B xhat + b from the reference triangle (0,0),(1,0),(0,1).
struct CellGeometry {
  std::array<std::array<double, 2>, 2> jacobian{};          // B
  std::array<std::array<double, 2>, 2> inverse_transpose{};  // B^{-T}
  Vec2 origin{};                                           // b
  double det = 0.0;                                        // signed det B
  double abs_det = 0.0;

  [[nodiscard]] Vec2 map(const Vec2& ref) const {
    return {origin[0] + jacobian[0][0] * ref[0] + jacobian[0][1] * ref[1],
            origin[1] + jacobian[1][0] * ref[0] + jacobian[1][1] * ref[1]};
  }
  /// Physical gradient from a reference gradient.
  [[nodiscard]] Vec2 push_gradient(const Vec2& ref_grad) const {
    return {inverse_transpose[0][0] * ref_grad[0] + inverse_transpose[0][1] * ref_grad[1],
            inverse_transpose[1][0] * ref_grad[0] + inverse_transpose[1][1] * ref_grad[1]};
  }
  /// Reference coordinates of a physical point.
  [[nodiscard]] Vec2 pull_back(const Vec2& x) const;
};

CellGeometry make_cell_geometry(const Vec2& p0, const Vec2& p1, const Vec2& p2);

/// Triangulation of the unit square. Local facet l of a cell is the edge
/// opposite its local vertex l.
class TriMesh {
 public:
  TriMesh() = default;

  [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<std::array<Index, 3>>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<FacetRecord>& facets() const { return facets_; }
  [[nodiscard]] const std::vector<std::array<Index, 3>>& cell_to_facets() const {
    return cell_to_facets_;
  }
  [[nodiscard]] double h_max() const { return h_max_; }
  [[nodiscard]] Index subdivisions() const { return n_; }

  [[nodiscard]] Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  [[nodiscard]] Index num_cells() const { return static_cast<Index>(cells_.size()); }
  [[nodiscard]] Index num_facets() const { return static_cast<Index>(facets_.size()); }
  [[nodiscard]] Index num_boundary_facets() const;

  [[nodiscard]] CellGeometry cell_geometry(Index cell) const;
  [[nodiscard]] double cell_area(Index cell) const;
  [[nodiscard]] double cell_diameter(Index cell) const;
  [[nodiscard]] Vec2 cell_centroid(Index cell) const;
  /// Outward unit normal of `cell` on `facet`.
  [[nodiscard]] Vec2 outward_normal(Index facet, Index cell) const;
  /// Local index (0..2) of `facet` within `cell`.
  [[nodiscard]] int local_facet(Index cell, Index facet) const;

  /// Cells sharing at least one vertex with `cell`, excluding `cell`.
  [[nodiscard]] std::vector<Index> vertex_neighbours(Index cell) const;

  void write(std::ostream& os) const;

 private:
  friend TriMesh build_structured_mesh(Index n);
  friend TriMesh classify_facets(TriMesh mesh, const std::function<bool(const Vec2&)>&);

  Index n_ = 0;
  std::vector<Vec2> vertices_;
  std::vector<std::array<Index, 3>> cells_;
  std::vector<FacetRecord> facets_;
  std::vector<std::array<Index, 3>> cell_to_facets_;
  double h_max_ = 0.0;
};

/// N x N squares, each bisected by its lower-left to upper-right diagonal.
/// All boundary facets start out Dirichlet.
TriMesh build_structured_mesh(Index n);

/// Splits boundary facets into Dirichlet (predicate true at the facet
/// midpoint) and Neumann.
TriMesh classify_facets(TriMesh mesh, const std::function<bool(const Vec2&)>& dirichlet);

}  // namespace iopeg
