#pragma once

#include <optional>

#include "quadrature.hpp"
#include "sparse.hpp"
#include "spaces.hpp"

namespace iopeg {

/// -div(kappa grad u) = f with kappa = diag(kappa0, 1).
struct ModelProblem {
  double kappa0 = 1.0;
  ScalarFn f = [](const Vec2&) { return 0.0; };
  ScalarFn u_D = [](const Vec2&) { return 0.0; };
  /// Neumann datum kappa grad u . n on Gamma_N.
  ScalarFn u_N = [](const Vec2&) { return 0.0; };
  /// Boundary facets whose midpoint satisfies this are Dirichlet.
  std::function<bool(const Vec2&)> dirichlet_region = [](const Vec2&) { return true; };

  [[nodiscard]] Vec2 flux(const Vec2& grad) const { return {kappa0 * grad[0], grad[1]}; }
  [[nodiscard]] double kappa_n(const Vec2& n) const {
    return kappa0 * n[0] * n[0] + n[1] * n[1];
  }
  void validate() const;
};

/// Interior facets are penalised with gamma_int h_e^{-1-alpha}, Dirichlet
/// facets with gamma_bdy h_e^{-1}; both carry kappa_n.
struct PenaltyParams {
  double gamma_int = 10.0;
  double gamma_bdy = 10.0;
  double alpha = 1.0;

  PenaltyParams() = default;
  PenaltyParams(double gamma, double alpha_) : gamma_int(gamma), gamma_bdy(gamma), alpha(alpha_) {}
  PenaltyParams(double g_int, double g_bdy, double alpha_)
      : gamma_int(g_int), gamma_bdy(g_bdy), alpha(alpha_) {}

  [[nodiscard]] double interior_weight(double h_e) const {
    return gamma_int * std::pow(h_e, -1.0 - alpha);
  }
  [[nodiscard]] double boundary_weight(double h_e) const { return gamma_bdy / h_e; }
  void validate() const;
};

/// Quadrature exactness used by assembly. Defaults to 2k on cells and
/// 2k + 2 on facets.
struct AssemblyOptions {
  int tri_degree = 0;
  int edge_degree = 0;

  static AssemblyOptions defaults(int k) { return {2 * k, 2 * k + 2}; }
  [[nodiscard]] AssemblyOptions resolved(int k) const {
    return {tri_degree > 0 ? tri_degree : 2 * k, edge_degree > 0 ? edge_degree : 2 * k + 2};
  }
};

struct ScalarJump {
  Vec2 jump;
  double average;
};
struct VectorJump {
  double jump;
  Vec2 average;
};

/// [[q]] and {q} on a facet; `minus` is present iff the facet is interior.
ScalarJump jump_avg(double plus, std::optional<double> minus, const Vec2& n_plus);
VectorJump jump_avg(const Vec2& plus, std::optional<Vec2> minus, const Vec2& n_plus);

/// Boundary classification from the problem's Dirichlet predicate.
TriMesh apply_boundary(TriMesh mesh, const ModelProblem& problem);

enum class Block { Full, Continuous, Constant };

/// Matrix of a_h on the product space (Full) or its restriction to one
/// factor (Continuous -> M_c, Constant -> M_0, each indexed from zero).
SparseSymMatrix assemble_matrix(const TriMesh& mesh, const EGSpace& space,
                                const ModelProblem& problem, const PenaltyParams& penalty,
                                Block block = Block::Full, AssemblyOptions options = {});

SparseSymMatrix assemble_block(const TriMesh& mesh, const EGSpace& space,
                               const ModelProblem& problem, const PenaltyParams& penalty,
                               Block block, AssemblyOptions options = {});

/// Load vector F(v) on the product space.
std::vector<double> assemble_rhs(const TriMesh& mesh, const EGSpace& space,
                                 const ModelProblem& problem, const PenaltyParams& penalty,
                                 AssemblyOptions options = {});

/// u = x(1-x) sin(pi y) with homogeneous Dirichlet data.
struct ManufacturedSolution {
  double kappa0 = 1.0;

  [[nodiscard]] double u(const Vec2& x) const;
  [[nodiscard]] Vec2 grad(const Vec2& x) const;
  [[nodiscard]] double f(const Vec2& x) const;
  [[nodiscard]] ModelProblem problem() const;
};

}  // namespace iopeg
