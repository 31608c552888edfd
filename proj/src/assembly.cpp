#include "assembly.hpp"

#include <numbers>

namespace iopeg {

void ModelProblem::validate() const {
  require(kappa0 > 0.0, ErrorCode::InvalidArgument, "kappa0 must be positive");
}

void PenaltyParams::validate() const {
  require(gamma_int > 0.0 && gamma_bdy > 0.0, ErrorCode::InvalidArgument,
          "penalty gamma must be positive");
  require(alpha >= 0.0, ErrorCode::InvalidArgument, "penalty alpha must be nonnegative");
}

ScalarJump jump_avg(double plus, std::optional<double> minus, const Vec2& n) {
  if (!minus) return {{plus * n[0], plus * n[1]}, plus};
  // n^- = -n^+
  return {{(plus - *minus) * n[0], (plus - *minus) * n[1]}, 0.5 * (plus + *minus)};
}

VectorJump jump_avg(const Vec2& plus, std::optional<Vec2> minus, const Vec2& n) {
  if (!minus) return {dot(plus, n), plus};
  return {dot(plus, n) - dot(*minus, n),
          {0.5 * (plus[0] + (*minus)[0]), 0.5 * (plus[1] + (*minus)[1])}};
}

TriMesh apply_boundary(TriMesh mesh, const ModelProblem& problem) {
  return classify_facets(std::move(mesh), problem.dirichlet_region);
}

namespace {

struct Dense {
  int n = 0;
  std::vector<double> a;
  explicit Dense(int n_) : n(n_), a(static_cast<std::size_t>(n_ * n_), 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
};

/// Global dofs of one cell restricted to the requested block, plus the
/// offset into the returned matrix.
struct CellDofs {
  std::vector<Index> dofs;
  int ncont = 0;  // leading entries that are continuous dofs
  bool has_const = false;
};

CellDofs cell_dofs(const EGSpace& space, Index cell, Block block) {
  CellDofs d;
  if (block != Block::Constant) {
    for (Index g : space.cont().cell_dofs(cell)) d.dofs.push_back(g);
    d.ncont = static_cast<int>(d.dofs.size());
  }
  if (block != Block::Continuous) {
    d.dofs.push_back(block == Block::Constant ? cell : space.const_offset() + cell);
    d.has_const = true;
  }
  return d;
}

/// Values and physical gradients of the cell's (block-restricted) basis at
/// a physical point.
void basis_at(const EGSpace& space, const CellGeometry& geo, const CellDofs& d, const Vec2& x,
              std::vector<double>& val, std::vector<Vec2>& grad) {
  const Vec2 ref = geo.pull_back(x);
  val.assign(d.dofs.size(), 0.0);
  grad.assign(d.dofs.size(), Vec2{0.0, 0.0});
  if (d.ncont > 0) {
    double v[kMaxLocalLagrange];
    Vec2 g[kMaxLocalLagrange];
    lagrange_values(space.degree(), ref, std::span<double>(v, kMaxLocalLagrange));
    lagrange_ref_gradients(space.degree(), ref, std::span<Vec2>(g, kMaxLocalLagrange));
    for (int i = 0; i < d.ncont; ++i) {
      val[static_cast<std::size_t>(i)] = v[i];
      grad[static_cast<std::size_t>(i)] = geo.push_gradient(g[i]);
    }
  }
  if (d.has_const) val.back() = 1.0;
}

void scatter(SparseSymMatrix& m, const std::vector<Index>& dofs, Dense& local) {
  for (int i = 0; i < local.n; ++i)
    for (int j = 0; j < local.n; ++j)
      m.add(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], local(i, j));
}

Vec2 facet_point(const TriMesh& mesh, const FacetRecord& f, double t) {
  const auto& a = mesh.vertices()[static_cast<std::size_t>(f.endpoints[0])];
  const auto& b = mesh.vertices()[static_cast<std::size_t>(f.endpoints[1])];
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

}  // namespace

SparseSymMatrix assemble_matrix(const TriMesh& mesh, const EGSpace& space,
                                const ModelProblem& problem, const PenaltyParams& penalty,
                                Block block, AssemblyOptions options) {
  problem.validate();
  penalty.validate();
  const auto& lag = space.cont();
  require(space.constants().ndofs() == mesh.num_cells() &&
              lag.ndofs() == (lag.degree() == 1 ? mesh.num_vertices()
                                                : mesh.num_vertices() + mesh.num_facets()),
          ErrorCode::DimensionMismatch, "space does not match mesh");
  const auto opt = options.resolved(space.degree());
  const auto quad = make_quadrature(opt.tri_degree, opt.edge_degree);

  const Index dim = block == Block::Full         ? space.total_ndofs()
                    : block == Block::Continuous ? lag.ndofs()
                                                 : mesh.num_cells();
  // Interior facets only see jumps, which vanish for continuous functions.
  const bool interior_terms = block != Block::Continuous;

  std::vector<CellDofs> dofs;
  dofs.reserve(static_cast<std::size_t>(mesh.num_cells()));
  std::vector<CellGeometry> geos;
  geos.reserve(static_cast<std::size_t>(mesh.num_cells()));
  std::vector<std::vector<Index>> groups;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    dofs.push_back(cell_dofs(space, c, block));
    geos.push_back(mesh.cell_geometry(c));
    groups.push_back(dofs.back().dofs);
  }
  if (interior_terms)
    for (const auto& f : mesh.facets()) {
      if (!f.interior()) continue;
      auto g = dofs[static_cast<std::size_t>(f.cell_plus)].dofs;
      const auto& gm = dofs[static_cast<std::size_t>(*f.cell_minus)].dofs;
      g.insert(g.end(), gm.begin(), gm.end());
      groups.push_back(std::move(g));
    }
  auto A = SparseSymMatrix::from_groups(dim, groups);
  groups.clear();

  std::vector<double> val;
  std::vector<Vec2> grad;

  // Volume: (kappa grad v, grad w)
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto& d = dofs[static_cast<std::size_t>(c)];
    if (d.ncont == 0) continue;
    const auto& geo = geos[static_cast<std::size_t>(c)];
    Dense local(static_cast<int>(d.dofs.size()));
    for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
      basis_at(space, geo, d, geo.map(quad.tri_points[q]), val, grad);
      const double w = quad.tri_weights[q] * geo.abs_det;
      for (int j = 0; j < d.ncont; ++j) {
        const Vec2 kg = problem.flux(grad[static_cast<std::size_t>(j)]);
        for (int i = 0; i < d.ncont; ++i) local(i, j) += w * dot(kg, grad[static_cast<std::size_t>(i)]);
      }
    }
    scatter(A, d.dofs, local);
  }

  // Facets: -<{kappa grad v}, [[w]]> - <[[v]], {kappa grad w}> + <pen [[v]], [[w]]>.
  // With [[v]] = jc n and {kappa grad v}.n = af for each basis function.
  std::vector<double> jc, af;
  std::vector<Index> fdofs;
  std::vector<double> val_m;
  std::vector<Vec2> grad_m;
  for (Index fi = 0; fi < mesh.num_facets(); ++fi) {
    const auto& f = mesh.facets()[static_cast<std::size_t>(fi)];
    if (f.cls == FacetClass::Neumann) continue;
    if (f.interior() && !interior_terms) continue;
    const auto& dp = dofs[static_cast<std::size_t>(f.cell_plus)];
    const auto& gp = geos[static_cast<std::size_t>(f.cell_plus)];
    const Vec2 n = f.normal;
    const double pen = problem.kappa_n(n) * (f.interior() ? penalty.interior_weight(f.length)
                                                          : penalty.boundary_weight(f.length));
    fdofs = dp.dofs;
    const CellDofs* dm = nullptr;
    const CellGeometry* gm = nullptr;
    if (f.interior()) {
      dm = &dofs[static_cast<std::size_t>(*f.cell_minus)];
      gm = &geos[static_cast<std::size_t>(*f.cell_minus)];
      fdofs.insert(fdofs.end(), dm->dofs.begin(), dm->dofs.end());
    }
    const int np = static_cast<int>(dp.dofs.size());
    const int m = static_cast<int>(fdofs.size());
    const double avg_scale = f.interior() ? 0.5 : 1.0;
    Dense local(m);
    jc.assign(static_cast<std::size_t>(m), 0.0);
    af.assign(static_cast<std::size_t>(m), 0.0);
    for (std::size_t q = 0; q < quad.edge_points.size(); ++q) {
      const Vec2 x = facet_point(mesh, f, quad.edge_points[q]);
      const double w = quad.edge_weights[q] * f.length;
      basis_at(space, gp, dp, x, val, grad);
      // Continuous functions have no jump across interior facets; dropping
      // the two canceling traces keeps the penalty out of the V_c rows.
      for (int i = 0; i < np; ++i) {
        jc[static_cast<std::size_t>(i)] =
            dm && i < dp.ncont ? 0.0 : val[static_cast<std::size_t>(i)];
        af[static_cast<std::size_t>(i)] =
            avg_scale * dot(problem.flux(grad[static_cast<std::size_t>(i)]), n);
      }
      if (dm) {
        basis_at(space, *gm, *dm, x, val_m, grad_m);
        for (int i = 0; i < m - np; ++i) {
          jc[static_cast<std::size_t>(np + i)] =
              i < dm->ncont ? 0.0 : -val_m[static_cast<std::size_t>(i)];
          af[static_cast<std::size_t>(np + i)] =
              avg_scale * dot(problem.flux(grad_m[static_cast<std::size_t>(i)]), n);
        }
      }
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
          local(i, j) += w * (pen * jc[si] * jc[sj] - (af[sj] * jc[si] + jc[sj] * af[si]));
        }
    }
    scatter(A, fdofs, local);
  }
  A.symmetrize();
  return A;
}

SparseSymMatrix assemble_block(const TriMesh& mesh, const EGSpace& space,
                               const ModelProblem& problem, const PenaltyParams& penalty,
                               Block block, AssemblyOptions options) {
  require(block != Block::Full, ErrorCode::InvalidArgument,
          "assemble_block expects Continuous or Constant");
  return assemble_matrix(mesh, space, problem, penalty, block, options);
}

std::vector<double> assemble_rhs(const TriMesh& mesh, const EGSpace& space,
                                 const ModelProblem& problem, const PenaltyParams& penalty,
                                 AssemblyOptions options) {
  problem.validate();
  penalty.validate();
  const auto opt = options.resolved(space.degree());
  const auto quad = make_quadrature(opt.tri_degree, opt.edge_degree);
  std::vector<double> b(static_cast<std::size_t>(space.total_ndofs()), 0.0);
  std::vector<double> val;
  std::vector<Vec2> grad;

  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto d = cell_dofs(space, c, Block::Full);
    const auto geo = mesh.cell_geometry(c);
    for (std::size_t q = 0; q < quad.tri_points.size(); ++q) {
      const Vec2 x = geo.map(quad.tri_points[q]);
      basis_at(space, geo, d, x, val, grad);
      const double w = quad.tri_weights[q] * geo.abs_det * problem.f(x);
      for (std::size_t i = 0; i < d.dofs.size(); ++i)
        b[static_cast<std::size_t>(d.dofs[i])] += w * val[i];
    }
  }

  for (const auto& f : mesh.facets()) {
    if (f.interior()) continue;
    const auto d = cell_dofs(space, f.cell_plus, Block::Full);
    const auto geo = mesh.cell_geometry(f.cell_plus);
    const Vec2 n = f.normal;
    const double pen = problem.kappa_n(n) * penalty.boundary_weight(f.length);
    for (std::size_t q = 0; q < quad.edge_points.size(); ++q) {
      const Vec2 x = facet_point(mesh, f, quad.edge_points[q]);
      const double w = quad.edge_weights[q] * f.length;
      basis_at(space, geo, d, x, val, grad);
      if (f.cls == FacetClass::Neumann) {
        const double g = problem.u_N(x);
        for (std::size_t i = 0; i < d.dofs.size(); ++i)
          b[static_cast<std::size_t>(d.dofs[i])] += w * g * val[i];
      } else {
        const double g = problem.u_D(x);
        for (std::size_t i = 0; i < d.dofs.size(); ++i)
          b[static_cast<std::size_t>(d.dofs[i])] +=
              w * g * (pen * val[i] - dot(problem.flux(grad[i]), n));
      }
    }
  }
  return b;
}

double ManufacturedSolution::u(const Vec2& x) const {
  return x[0] * (1.0 - x[0]) * std::sin(std::numbers::pi * x[1]);
}

Vec2 ManufacturedSolution::grad(const Vec2& x) const {
  const double pi = std::numbers::pi;
  return {(1.0 - 2.0 * x[0]) * std::sin(pi * x[1]), pi * x[0] * (1.0 - x[0]) * std::cos(pi * x[1])};
}

double ManufacturedSolution::f(const Vec2& x) const {
  const double pi = std::numbers::pi;
  return (2.0 * kappa0 + pi * pi * x[0] * (1.0 - x[0])) * std::sin(pi * x[1]);
}

ModelProblem ManufacturedSolution::problem() const {
  ModelProblem p;
  p.kappa0 = kappa0;
  const ManufacturedSolution self = *this;
  p.f = [self](const Vec2& x) { return self.f(x); };
  return p;
}

}  // namespace iopeg
