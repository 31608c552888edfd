#include "postprocess.hpp"

#include <Eigen/Dense>

namespace iopeg {

namespace {

Vec2 facet_point(const TriMesh& mesh, const FacetRecord& f, double t) {
  const auto& a = mesh.vertices()[static_cast<std::size_t>(f.endpoints[0])];
  const auto& b = mesh.vertices()[static_cast<std::size_t>(f.endpoints[1])];
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

double legendre(int j, double t) { return j == 0 ? 1.0 : 2.0 * t - 1.0; }

struct Scaling {
  Vec2 centre;
  double h;
};

Scaling cell_scaling(const TriMesh& mesh, Index cell) {
  return {mesh.cell_centroid(cell), mesh.cell_diameter(cell)};
}

/// Local RTN basis at a physical point.
void rtn_basis(int degree, const Scaling& s, const Vec2& x, std::array<Vec2, 8>& phi) {
  const double a = (x[0] - s.centre[0]) / s.h, b = (x[1] - s.centre[1]) / s.h;
  phi[0] = {1.0, 0.0};
  phi[1] = {0.0, 1.0};
  if (degree == 1) {
    phi[2] = {a, b};
    return;
  }
  phi[2] = {a, 0.0};
  phi[3] = {b, 0.0};
  phi[4] = {0.0, a};
  phi[5] = {0.0, b};
  phi[6] = {a * a, a * b};
  phi[7] = {a * b, b * b};
}

void rtn_divergence(int degree, const Scaling& s, const Vec2& x, std::array<double, 8>& div) {
  const double a = (x[0] - s.centre[0]) / s.h, b = (x[1] - s.centre[1]) / s.h;
  div.fill(0.0);
  if (degree == 1) {
    div[2] = 2.0 / s.h;
    return;
  }
  div[2] = 1.0 / s.h;
  div[5] = 1.0 / s.h;
  div[6] = 3.0 * a / s.h;
  div[7] = 3.0 * b / s.h;
}

/// Side information for evaluating u_h on one cell at facet points.
struct Side {
  Index cell;
  CellGeometry geo;
};

double u_at(const EGSpace& space, const EGFunction& u, const Side& s, const Vec2& x) {
  return eval_eg(space, u, s.cell, s.geo.pull_back(x));
}

Vec2 grad_at(const EGSpace& space, const TriMesh& mesh, const EGFunction& u, const Side& s,
             const Vec2& x) {
  return eval_cont_grad(space.cont(), mesh, u.cont(space), s.cell, s.geo.pull_back(x));
}

}  // namespace

void rebuild_coefficients(RTNFlux& z, const TriMesh& mesh) {
  require(z.degree == 1 || z.degree == 2, ErrorCode::InvalidArgument,
          "flux degree must be 1 or 2");
  const int k = z.degree, nd = z.local_dim();
  require(static_cast<Index>(z.facet_moments.size()) == mesh.num_facets() * k &&
              static_cast<Index>(z.cell_moments.size()) == (k == 2 ? 2 * mesh.num_cells() : 0),
          ErrorCode::DimensionMismatch, "flux moments do not match mesh");
  const auto quad = make_quadrature(2 * k, 2 * k);
  z.coefficients.assign(static_cast<std::size_t>(mesh.num_cells() * nd), 0.0);
  std::array<Vec2, 8> phi{};

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto s = cell_scaling(mesh, c);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::VectorXd rhs(nd);
    int row = 0;
    for (Index fi : mesh.cell_to_facets()[static_cast<std::size_t>(c)]) {
      const auto& f = mesh.facets()[static_cast<std::size_t>(fi)];
      for (int j = 0; j < k; ++j, ++row) {
        for (std::size_t q = 0; q < quad.edge_points.size(); ++q) {
          const double t = quad.edge_points[q];
          rtn_basis(k, s, facet_point(mesh, f, t), phi);
          const double w = quad.edge_weights[q] * f.length * legendre(j, t);
          for (int b = 0; b < nd; ++b) M(row, b) += w * dot(phi[static_cast<std::size_t>(b)], f.normal);
        }
        rhs(row) = z.facet_moment(fi, j);
      }
    }
    if (k == 2) {
      const auto geo = mesh.cell_geometry(c);
      for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
        rtn_basis(k, s, geo.map(quad.tri_points[q]), phi);
        const double w = quad.tri_weights[q] * geo.abs_det;
        for (int b = 0; b < nd; ++b) {
          M(row, b) += w * phi[static_cast<std::size_t>(b)][0];
          M(row + 1, b) += w * phi[static_cast<std::size_t>(b)][1];
        }
      }
      rhs(row) = z.cell_moments[static_cast<std::size_t>(2 * c)];
      rhs(row + 1) = z.cell_moments[static_cast<std::size_t>(2 * c + 1)];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    require(lu.isInvertible(), ErrorCode::Internal, "singular RTN moment system");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (int b = 0; b < nd; ++b) z.coefficients[static_cast<std::size_t>(c * nd + b)] = x(b);
  }
}

Vec2 eval_flux(const RTNFlux& z, const TriMesh& mesh, Index cell, const Vec2& x) {
  std::array<Vec2, 8> phi{};
  rtn_basis(z.degree, cell_scaling(mesh, cell), x, phi);
  Vec2 out{0.0, 0.0};
  const int nd = z.local_dim();
  for (int b = 0; b < nd; ++b) {
    const double c = z.coefficients[static_cast<std::size_t>(cell * nd + b)];
    out[0] += c * phi[static_cast<std::size_t>(b)][0];
    out[1] += c * phi[static_cast<std::size_t>(b)][1];
  }
  return out;
}

double eval_flux_div(const RTNFlux& z, const TriMesh& mesh, Index cell, const Vec2& x) {
  std::array<double, 8> div{};
  rtn_divergence(z.degree, cell_scaling(mesh, cell), x, div);
  double out = 0.0;
  const int nd = z.local_dim();
  for (int b = 0; b < nd; ++b)
    out += z.coefficients[static_cast<std::size_t>(cell * nd + b)] * div[static_cast<std::size_t>(b)];
  return out;
}

RTNFlux recover_flux(const EGSpace& space, const TriMesh& mesh, const EGFunction& u,
                     const ModelProblem& problem, const PenaltyParams& penalty,
                     AssemblyOptions options) {
  problem.validate();
  penalty.validate();
  require(static_cast<Index>(u.coeffs.size()) == space.total_ndofs(),
          ErrorCode::DimensionMismatch, "solution does not match space");
  const int k = space.degree();
  const auto opt = options.resolved(k);
  const auto quad = make_quadrature(opt.tri_degree, opt.edge_degree);

  const auto u0 = u.constants(space);
  RTNFlux z;
  z.degree = k;
  z.facet_moments.assign(static_cast<std::size_t>(mesh.num_facets() * k), 0.0);
  z.cell_moments.assign(static_cast<std::size_t>(k == 2 ? 2 * mesh.num_cells() : 0), 0.0);

  for (Index fi = 0; fi < mesh.num_facets(); ++fi) {
    const auto& f = mesh.facets()[static_cast<std::size_t>(fi)];
    const Vec2 n = f.normal;
    const double kn = problem.kappa_n(n);
    const Side plus{f.cell_plus, mesh.cell_geometry(f.cell_plus)};
    std::optional<Side> minus;
    if (f.interior()) minus = Side{*f.cell_minus, mesh.cell_geometry(*f.cell_minus)};
    for (std::size_t q = 0; q < quad.edge_points.size(); ++q) {
      const double t = quad.edge_points[q];
      const Vec2 x = facet_point(mesh, f, t);
      double g = 0.0;
      switch (f.cls) {
        case FacetClass::Interior: {
          const Vec2 gp = problem.flux(grad_at(space, mesh, u, plus, x));
          const Vec2 gm = problem.flux(grad_at(space, mesh, u, *minus, x));
          const double jump = u0[static_cast<std::size_t>(plus.cell)] -
                              u0[static_cast<std::size_t>(minus->cell)];
          g = -0.5 * (dot(gp, n) + dot(gm, n)) + kn * penalty.interior_weight(f.length) * jump;
          break;
        }
        case FacetClass::Dirichlet:
          g = -dot(problem.flux(grad_at(space, mesh, u, plus, x)), n) +
              kn * penalty.boundary_weight(f.length) * (u_at(space, u, plus, x) - problem.u_D(x));
          break;
        case FacetClass::Neumann:
          g = -problem.u_N(x);
          break;
      }
      const double w = quad.edge_weights[q] * f.length;
      for (int j = 0; j < k; ++j)
        z.facet_moments[static_cast<std::size_t>(fi * k + j)] += w * g * legendre(j, t);
    }
  }

  if (k == 2)
    for (Index c = 0; c < mesh.num_cells(); ++c) {
      const Side s{c, mesh.cell_geometry(c)};
      for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
        const Vec2 x = s.geo.map(quad.tri_points[q]);
        const Vec2 kg = problem.flux(grad_at(space, mesh, u, s, x));
        const double w = quad.tri_weights[q] * s.geo.abs_det;
        z.cell_moments[static_cast<std::size_t>(2 * c)] -= w * kg[0];
        z.cell_moments[static_cast<std::size_t>(2 * c + 1)] -= w * kg[1];
      }
    }

  rebuild_coefficients(z, mesh);
  return z;
}

ConservationResidual conservation_residual(const RTNFlux& z, const ScalarFn& f,
                                           const TriMesh& mesh, int tri_degree) {
  const int deg = tri_degree > 0 ? tri_degree : 2 * z.degree;
  // div z_h has degree k - 1, so 2k integrates it exactly as well.
  const auto quad = make_quadrature(std::max(deg, 2 * z.degree), 1);
  const auto fquad = make_quadrature(deg, 1);
  ConservationResidual out;
  out.per_cell.assign(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  double sum = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto geo = mesh.cell_geometry(c);
    double fi = 0.0, di = 0.0;
    for (std::size_t q = 0; q < fquad.tri_points.size(); ++q)
      fi += fquad.tri_weights[q] * geo.abs_det * f(geo.map(fquad.tri_points[q]));
    for (std::size_t q = 0; q < quad.tri_points.size(); ++q)
      di += quad.tri_weights[q] * geo.abs_det *
            eval_flux_div(z, mesh, c, geo.map(quad.tri_points[q]));
    const double r = fi - di;
    out.per_cell[static_cast<std::size_t>(c)] = r;
    sum += r * r / (0.5 * geo.abs_det);
  }
  out.global = std::sqrt(sum);
  return out;
}

double interior_jump_seminorm(std::span<const double> v0, const TriMesh& mesh) {
  require(static_cast<Index>(v0.size()) == mesh.num_cells(), ErrorCode::DimensionMismatch,
          "P0 vector does not match mesh");
  double s = 0.0;
  for (const auto& f : mesh.facets()) {
    if (!f.interior()) continue;
    const double d = v0[static_cast<std::size_t>(f.cell_plus)] -
                     v0[static_cast<std::size_t>(*f.cell_minus)];
    // h_e^{-1} * |e| * d^2 with h_e = |e|
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

/// (grad e, grad e) + gamma h^{-1-alpha} ||[[e]]||^2 on interior facets +
/// gamma h^{-1} ||[[e]]||^2 on Dirichlet facets, for u_h given by value
/// and gradient callbacks per cell.
template <typename Val, typename Grad>
double energy_error(const TriMesh& mesh, int k, Val&& uh, Grad&& guh, const ScalarFn& u_exact,
                    const VectorFn& grad_exact, const PenaltyParams& penalty,
                    bool with_interior) {
  const auto quad = make_quadrature(2 * k + 4, 2 * k + 4);
  double s = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto geo = mesh.cell_geometry(c);
    for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
      const Vec2 x = geo.map(quad.tri_points[q]);
      const Vec2 ge = grad_exact(x), gh = guh(c, geo, x);
      const Vec2 d{ge[0] - gh[0], ge[1] - gh[1]};
      s += quad.tri_weights[q] * geo.abs_det * dot(d, d);
    }
  }
  for (const auto& f : mesh.facets()) {
    if (f.cls == FacetClass::Neumann) continue;
    if (f.interior() && !with_interior) continue;
    const double pen = f.interior() ? penalty.interior_weight(f.length)
                                    : penalty.boundary_weight(f.length);
    const auto gp = mesh.cell_geometry(f.cell_plus);
    std::optional<CellGeometry> gm;
    if (f.interior()) gm = mesh.cell_geometry(*f.cell_minus);
    for (std::size_t q = 0; q < quad.edge_points.size(); ++q) {
      const Vec2 x = facet_point(mesh, f, quad.edge_points[q]);
      // The exact solution is continuous and matches u_D on the boundary.
      const double jump = f.interior() ? uh(f.cell_plus, gp, x) - uh(*f.cell_minus, *gm, x)
                                       : uh(f.cell_plus, gp, x) - u_exact(x);
      s += quad.edge_weights[q] * f.length * pen * jump * jump;
    }
  }
  return std::sqrt(s);
}

}  // namespace

ErrorReport error_norms(const EGSpace& space, const TriMesh& mesh, const EGFunction& u,
                        const ScalarFn& u_exact, const VectorFn& grad_exact,
                        const ModelProblem& problem, const PenaltyParams& penalty,
                        const RTNFlux* flux, AssemblyOptions options) {
  require(static_cast<Index>(u.coeffs.size()) == space.total_ndofs(),
          ErrorCode::DimensionMismatch, "solution does not match space");
  const int k = space.degree();
  const auto quad = make_quadrature(2 * k + 4, 2 * k + 4);
  ErrorReport r;

  auto uh = [&](Index c, const CellGeometry& g, const Vec2& x) {
    return eval_eg(space, u, c, g.pull_back(x));
  };
  auto guh = [&](Index c, const CellGeometry& g, const Vec2& x) {
    return eval_cont_grad(space.cont(), mesh, u.cont(space), c, g.pull_back(x));
  };

  double l2 = 0.0, fl = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto geo = mesh.cell_geometry(c);
    for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
      const Vec2 x = geo.map(quad.tri_points[q]);
      const double w = quad.tri_weights[q] * geo.abs_det;
      const double e = u_exact(x) - uh(c, geo, x);
      l2 += w * e * e;
      if (flux) {
        const Vec2 z = problem.flux(grad_exact(x));
        const Vec2 zh = eval_flux(*flux, mesh, c, x);
        // z = -kappa grad u
        const double dx = -z[0] - zh[0], dy = -z[1] - zh[1];
        fl += w * (dx * dx / problem.kappa0 + dy * dy);
      }
    }
  }
  r.l2_error = std::sqrt(l2);
  r.flux_error = std::sqrt(fl);
  r.ah_error = energy_error(mesh, k, uh, guh, u_exact, grad_exact, penalty, true);
  r.interior_jump_seminorm = interior_jump_seminorm(u.constants(space), mesh);
  if (flux)
    r.conservation_residual =
        conservation_residual(*flux, problem.f, mesh, options.resolved(k).tri_degree).global;
  return r;
}

double ah_error_continuous(const LagrangeSpace& space, const TriMesh& mesh,
                           std::span<const double> v, const ScalarFn& u_exact,
                           const VectorFn& grad_exact, const PenaltyParams& penalty) {
  require(static_cast<Index>(v.size()) == space.ndofs(), ErrorCode::DimensionMismatch,
          "coefficient vector does not match space");
  auto vh = [&](Index c, const CellGeometry& g, const Vec2& x) {
    return eval_cont(space, v, c, g.pull_back(x));
  };
  auto gvh = [&](Index c, const CellGeometry& g, const Vec2& x) {
    return eval_cont_grad(space, mesh, v, c, g.pull_back(x));
  };
  return energy_error(mesh, space.degree(), vh, gvh, u_exact, grad_exact, penalty, false);
}

EstimatorIndicators residual_estimator(const LagrangeSpace& space, const TriMesh& mesh,
                                       std::span<const double> v, const ScalarFn& f,
                                       double kappa0) {
  require(static_cast<Index>(v.size()) == space.ndofs(), ErrorCode::DimensionMismatch,
          "coefficient vector does not match space");
  const int k = space.degree();
  const auto quad = make_quadrature(2 * k + 4, 2 * k + 2);
  EstimatorIndicators out;
  out.cell.assign(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  out.facet.assign(static_cast<std::size_t>(mesh.num_facets()), 0.0);

  const std::array<Vec2, 3> ref_grad_lambda{Vec2{-1.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto geo = mesh.cell_geometry(c);
    // div(kappa grad v) is constant on a cell for P2 and zero for P1.
    double lap = 0.0;
    if (k == 2) {
      std::array<Vec2, 3> gl;
      for (int i = 0; i < 3; ++i) gl[static_cast<std::size_t>(i)] = geo.push_gradient(ref_grad_lambda[static_cast<std::size_t>(i)]);
      auto kdot = [&](const Vec2& a, const Vec2& b) { return kappa0 * a[0] * b[0] + a[1] * b[1]; };
      const auto dofs = space.cell_dofs(c);
      for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<std::size_t>(i);
        lap += v[static_cast<std::size_t>(dofs[si])] * 4.0 * kdot(gl[si], gl[si]);
        const auto a = static_cast<std::size_t>((i + 1) % 3), b = static_cast<std::size_t>((i + 2) % 3);
        lap += v[static_cast<std::size_t>(dofs[3 + si])] * 8.0 * kdot(gl[a], gl[b]);
      }
    }
    double s = 0.0;
    for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
      const double r = f(geo.map(quad.tri_points[q])) + lap;
      s += quad.tri_weights[q] * geo.abs_det * r * r;
    }
    out.cell[static_cast<std::size_t>(c)] = mesh.cell_diameter(c) * std::sqrt(s);
  }

  for (Index fi = 0; fi < mesh.num_facets(); ++fi) {
    const auto& f = mesh.facets()[static_cast<std::size_t>(fi)];
    if (!f.interior()) continue;
    const auto gp = mesh.cell_geometry(f.cell_plus);
    const auto gm = mesh.cell_geometry(*f.cell_minus);
    double s = 0.0;
    for (std::size_t q = 0; q < quad.edge_points.size(); ++q) {
      const Vec2 x = facet_point(mesh, f, quad.edge_points[q]);
      const Vec2 a = eval_cont_grad(space, mesh, v, f.cell_plus, gp.pull_back(x));
      const Vec2 b = eval_cont_grad(space, mesh, v, *f.cell_minus, gm.pull_back(x));
      const Vec2 d{a[0] - b[0], a[1] - b[1]};
      s += quad.edge_weights[q] * f.length * dot(d, d);
    }
    out.facet[static_cast<std::size_t>(fi)] = std::sqrt(f.length) * std::sqrt(s);
  }
  return out;
}

Index adjacent_count(const TriMesh& mesh, Index cell) {
  return static_cast<Index>(mesh.vertex_neighbours(cell).size());
}

std::vector<double> phi_construct(std::span<const double> v0, Index cell, const TriMesh& mesh) {
  require(static_cast<Index>(v0.size()) == mesh.num_cells(), ErrorCode::DimensionMismatch,
          "P0 vector does not match mesh");
  require(cell >= 0 && cell < mesh.num_cells(), ErrorCode::InvalidArgument,
          "cell index out of range");
  const auto nb = mesh.vertex_neighbours(cell);
  const double p0 = v0[static_cast<std::size_t>(cell)];
  double s = 0.0;
  for (Index t : nb) s += v0[static_cast<std::size_t>(t)] - p0;
  std::vector<double> phi(v0.size(), 0.0);
  phi[static_cast<std::size_t>(cell)] = s / static_cast<double>(nb.size() + 1);
  return phi;
}

std::vector<Index> dirichlet_cells(const TriMesh& mesh) {
  std::vector<Index> out;
  for (Index c = 0; c < mesh.num_cells(); ++c)
    for (Index fi : mesh.cell_to_facets()[static_cast<std::size_t>(c)])
      if (mesh.facets()[static_cast<std::size_t>(fi)].cls == FacetClass::Dirichlet) {
        out.push_back(c);
        break;
      }
  return out;
}

std::vector<double> phi_sum_dirichlet(std::span<const double> v0, const TriMesh& mesh) {
  std::vector<double> out(v0.size(), 0.0);
  for (Index c : dirichlet_cells(mesh)) {
    const auto phi = phi_construct(v0, c, mesh);
    out[static_cast<std::size_t>(c)] += phi[static_cast<std::size_t>(c)];
  }
  return out;
}

}  // namespace iopeg
