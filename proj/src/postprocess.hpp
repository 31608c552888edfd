#pragma once

#include "assembly.hpp"

namespace iopeg {

/// H(div)-conforming flux in RTN_k (k = 1, 2).
///
/// The degrees of freedom are facet moments against the Legendre
/// polynomials {1, 2t - 1} on each facet (t runs from endpoints[0] to
/// endpoints[1], normal is the facet's plus normal) and, for k = 2, the two
/// cell moments against the constant vectors. `coefficients` is derived
/// from the moments by rebuild_coefficients and expands z_h on each cell in
/// the scaled monomials of xi = (x - centroid) / diameter:
///   k = 1: (1,0), (0,1), xi
///   k = 2: (1,0), (0,1), (xi1,0), (xi2,0), (0,xi1), (0,xi2), xi*xi1, xi*xi2
struct RTNFlux {
  int degree = 1;
  std::vector<double> facet_moments;  // num_facets x k
  std::vector<double> cell_moments;   // num_cells x 2 (k = 2 only)
  std::vector<double> coefficients;   // num_cells x local_dim()

  [[nodiscard]] int local_dim() const { return degree == 1 ? 3 : 8; }
  [[nodiscard]] double facet_moment(Index facet, int j) const {
    return facet_moments[static_cast<std::size_t>(facet * degree + j)];
  }
};

/// Solves the per-cell moment systems. Call after editing moments by hand.
void rebuild_coefficients(RTNFlux& z, const TriMesh& mesh);

Vec2 eval_flux(const RTNFlux& z, const TriMesh& mesh, Index cell, const Vec2& x);
double eval_flux_div(const RTNFlux& z, const TriMesh& mesh, Index cell, const Vec2& x);

/// z_h from the facet fluxes of a discrete solution. `options` must match
/// the assembly that produced u_h so boundary data are integrated alike.
RTNFlux recover_flux(const EGSpace& space, const TriMesh& mesh, const EGFunction& u,
                     const ModelProblem& problem, const PenaltyParams& penalty,
                     AssemblyOptions options = {});

struct ConservationResidual {
  /// r_T = (f, 1_T) - (div z_h, 1_T)
  std::vector<double> per_cell;
  /// ||P_0(f - div z_h)||_0
  double global = 0.0;
};

/// (f, 1_T) uses the cell rule of degree `tri_degree` (0 picks 2k, the
/// assembly default).
ConservationResidual conservation_residual(const RTNFlux& z, const ScalarFn& f,
                                           const TriMesh& mesh, int tri_degree = 0);

struct ErrorReport {
  double l2_error = 0.0;
  double ah_error = 0.0;
  double flux_error = 0.0;
  double conservation_residual = 0.0;
  double interior_jump_seminorm = 0.0;
};

/// Error quantities against an exact solution. The energy error is
/// (grad e, grad e) plus the gamma-weighted jump terms of a_h without the
/// kappa_n factor; the flux error is measured in the kappa^{-1} norm.
/// Integrals use exactness 2k + 4.
ErrorReport error_norms(const EGSpace& space, const TriMesh& mesh, const EGFunction& u,
                        const ScalarFn& u_exact, const VectorFn& grad_exact,
                        const ModelProblem& problem, const PenaltyParams& penalty,
                        const RTNFlux* flux = nullptr, AssemblyOptions options = {});

/// Energy error of a continuous function v against u_exact, i.e. the same
/// norm as ErrorReport::ah_error restricted to V_c.
double ah_error_continuous(const LagrangeSpace& space, const TriMesh& mesh,
                           std::span<const double> v, const ScalarFn& u_exact,
                           const VectorFn& grad_exact, const PenaltyParams& penalty);

/// |v0|_{H^1_h}: piecewise constants have no broken gradient, so only the
/// interior jumps h_e^{-1} ||[[v0]]||^2 contribute.
double interior_jump_seminorm(std::span<const double> v0, const TriMesh& mesh);

struct EstimatorIndicators {
  std::vector<double> cell;   // h_T ||f + div(kappa grad v)||_{0,T}
  std::vector<double> facet;  // h_e^{1/2} ||grad v^+ - grad v^-||_{0,e}, interior only
};

/// Residual indicators of a continuous P_k function. kappa0 = 1 gives the
/// plain Laplacian.
EstimatorIndicators residual_estimator(const LagrangeSpace& space, const TriMesh& mesh,
                                       std::span<const double> v, const ScalarFn& f,
                                       double kappa0 = 1.0);

/// Number of cells sharing at least one point with `cell`.
Index adjacent_count(const TriMesh& mesh, Index cell);

/// phi_{v0,T0}: supported on T0 with value sum_i (p_i - p_0) / (N(T0) + 1)
/// over the cells adjacent to T0.
std::vector<double> phi_construct(std::span<const double> v0, Index cell, const TriMesh& mesh);

/// Cells with at least one Dirichlet facet.
std::vector<Index> dirichlet_cells(const TriMesh& mesh);

/// sum over dirichlet_cells(mesh) of phi_construct(v0, T).
std::vector<double> phi_sum_dirichlet(std::span<const double> v0, const TriMesh& mesh);

}  // namespace iopeg
