#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mesh.hpp"

namespace iopeg {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

inline constexpr int kMaxLocalLagrange = 6;

/// Reference-element shape functions of P1 (k = 1) or P2 (k = 2). Local
/// order: vertex shapes 0..2, then for P2 the midpoint shapes of local
/// facets 0..2 (facet l is opposite vertex l).
int lagrange_local_count(int degree);
void lagrange_values(int degree, const Vec2& ref, std::span<double> out);
void lagrange_ref_gradients(int degree, const Vec2& ref, std::span<Vec2> out);

/// Continuous P_k, k in {1, 2}. Global numbering: vertex dofs carry the
/// vertex index; P2 edge dofs are num_vertices + facet index.
class LagrangeSpace {
 public:
  LagrangeSpace(const TriMesh& mesh, int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] Index ndofs() const { return ndofs_; }
  [[nodiscard]] int local_count() const { return lagrange_local_count(degree_); }
  [[nodiscard]] std::span<const Index> cell_dofs(Index cell) const {
    return {dofs_.data() + cell * local_count(), static_cast<std::size_t>(local_count())};
  }
  /// Physical location of every global dof.
  [[nodiscard]] const std::vector<Vec2>& nodes() const { return nodes_; }

 private:
  int degree_;
  Index ndofs_;
  std::vector<Index> dofs_;
  std::vector<Vec2> nodes_;
};

/// Piecewise constants: dof T is the indicator of cell T.
class P0Space {
 public:
  explicit P0Space(const TriMesh& mesh) : ndofs_(mesh.num_cells()) {}
  [[nodiscard]] Index ndofs() const { return ndofs_; }
  [[nodiscard]] Index cell_dof(Index cell) const { return cell; }

 private:
  Index ndofs_;
};

/// Product space V_c x V_0. Continuous dofs come first, then one dof per cell.
class EGSpace {
 public:
  EGSpace(const TriMesh& mesh, int degree) : cont_(mesh, degree), const_(mesh) {}

  [[nodiscard]] const LagrangeSpace& cont() const { return cont_; }
  [[nodiscard]] const P0Space& constants() const { return const_; }
  [[nodiscard]] Index total_ndofs() const { return cont_.ndofs() + const_.ndofs(); }
  [[nodiscard]] Index const_offset() const { return cont_.ndofs(); }
  [[nodiscard]] int degree() const { return cont_.degree(); }
  /// (1, ..., 1, -1, ..., -1): represents the zero function.
  [[nodiscard]] std::vector<double> kernel_vector() const;

 private:
  LagrangeSpace cont_;
  P0Space const_;
};

/// Values of all local basis functions at a reference point (P0: single 1).
std::vector<double> eval_basis(const LagrangeSpace& space, const Vec2& ref);
std::vector<double> eval_basis(const P0Space& space, const Vec2& ref);

/// Physical gradients of the local basis of `cell` at a reference point.
std::vector<Vec2> eval_basis_grad(const LagrangeSpace& space, const TriMesh& mesh, Index cell,
                                  const Vec2& ref);
std::vector<Vec2> eval_basis_grad(const P0Space& space, const TriMesh& mesh, Index cell,
                                  const Vec2& ref);

/// Nodal interpolant (Lagrange) or barycentre values (P0).
std::vector<double> interpolate(const LagrangeSpace& space, const ScalarFn& f);
std::vector<double> interpolate(const P0Space& space, const TriMesh& mesh, const ScalarFn& f);

/// u_h = u_c + u_0 split by the product-space dof layout.
struct EGFunction {
  std::vector<double> coeffs;

  [[nodiscard]] std::span<const double> cont(const EGSpace& s) const {
    return {coeffs.data(), static_cast<std::size_t>(s.cont().ndofs())};
  }
  [[nodiscard]] std::span<const double> constants(const EGSpace& s) const {
    return {coeffs.data() + s.const_offset(), static_cast<std::size_t>(s.constants().ndofs())};
  }
};

/// Value and gradient of the continuous part on `cell` at a reference point.
double eval_cont(const LagrangeSpace& space, std::span<const double> coeffs, Index cell,
                 const Vec2& ref);
Vec2 eval_cont_grad(const LagrangeSpace& space, const TriMesh& mesh,
                    std::span<const double> coeffs, Index cell, const Vec2& ref);

/// u_c + u_0 on `cell` at a reference point.
double eval_eg(const EGSpace& space, const EGFunction& u, Index cell, const Vec2& ref);

/// Locates the cell containing a physical point (structured mesh only) and
/// evaluates u_h there.
double eval_eg_at(const EGSpace& space, const TriMesh& mesh, const EGFunction& u, const Vec2& x);

}  // namespace iopeg
