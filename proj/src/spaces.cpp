#include "spaces.hpp"

#include <algorithm>

namespace iopeg {

int lagrange_local_count(int degree) {
  require(degree == 1 || degree == 2, ErrorCode::InvalidArgument,
          "Lagrange degree must be 1 or 2");
  return degree == 1 ? 3 : 6;
}

void lagrange_values(int degree, const Vec2& ref, std::span<double> out) {
  const double l[3] = {1.0 - ref[0] - ref[1], ref[0], ref[1]};
  if (degree == 1) {
    out[0] = l[0];
    out[1] = l[1];
    out[2] = l[2];
    return;
  }
  for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = l[i] * (2.0 * l[i] - 1.0);
  for (int e = 0; e < 3; ++e)
    out[static_cast<std::size_t>(3 + e)] = 4.0 * l[(e + 1) % 3] * l[(e + 2) % 3];
}

void lagrange_ref_gradients(int degree, const Vec2& ref, std::span<Vec2> out) {
  const double l[3] = {1.0 - ref[0] - ref[1], ref[0], ref[1]};
  const Vec2 dl[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = dl[i];
    return;
  }
  for (int i = 0; i < 3; ++i) {
    const double s = 4.0 * l[i] - 1.0;
    out[static_cast<std::size_t>(i)] = {s * dl[i][0], s * dl[i][1]};
  }
  for (int e = 0; e < 3; ++e) {
    const int a = (e + 1) % 3, b = (e + 2) % 3;
    out[static_cast<std::size_t>(3 + e)] = {4.0 * (dl[a][0] * l[b] + l[a] * dl[b][0]),
                                            4.0 * (dl[a][1] * l[b] + l[a] * dl[b][1])};
  }
}

LagrangeSpace::LagrangeSpace(const TriMesh& mesh, int degree) : degree_(degree) {
  const int nloc = lagrange_local_count(degree);
  const Index nv = mesh.num_vertices();
  ndofs_ = degree == 1 ? nv : nv + mesh.num_facets();
  dofs_.resize(static_cast<std::size_t>(mesh.num_cells() * nloc));
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto& cv = mesh.cells()[static_cast<std::size_t>(c)];
    Index* d = dofs_.data() + c * nloc;
    for (int i = 0; i < 3; ++i) d[i] = cv[static_cast<std::size_t>(i)];
    if (degree == 2) {
      const auto& cf = mesh.cell_to_facets()[static_cast<std::size_t>(c)];
      for (int e = 0; e < 3; ++e) d[3 + e] = nv + cf[static_cast<std::size_t>(e)];
    }
  }
  nodes_ = mesh.vertices();
  if (degree == 2)
    for (const auto& f : mesh.facets()) nodes_.push_back(f.midpoint(mesh.vertices()));
}

std::vector<double> EGSpace::kernel_vector() const {
  std::vector<double> k(static_cast<std::size_t>(total_ndofs()), 1.0);
  std::fill(k.begin() + const_offset(), k.end(), -1.0);
  return k;
}

std::vector<double> eval_basis(const LagrangeSpace& space, const Vec2& ref) {
  std::vector<double> v(static_cast<std::size_t>(space.local_count()));
  lagrange_values(space.degree(), ref, v);
  return v;
}

std::vector<double> eval_basis(const P0Space&, const Vec2&) { return {1.0}; }

std::vector<Vec2> eval_basis_grad(const LagrangeSpace& space, const TriMesh& mesh, Index cell,
                                  const Vec2& ref) {
  const auto g = mesh.cell_geometry(cell);
  std::vector<Vec2> grads(static_cast<std::size_t>(space.local_count()));
  lagrange_ref_gradients(space.degree(), ref, grads);
  for (auto& d : grads) d = g.push_gradient(d);
  return grads;
}

std::vector<Vec2> eval_basis_grad(const P0Space&, const TriMesh& mesh, Index cell, const Vec2&) {
  (void)mesh.cell_geometry(cell);
  return {Vec2{0.0, 0.0}};
}

std::vector<double> interpolate(const LagrangeSpace& space, const ScalarFn& f) {
  std::vector<double> out;
  out.reserve(space.nodes().size());
  for (const auto& x : space.nodes()) out.push_back(f(x));
  return out;
}

std::vector<double> interpolate(const P0Space& space, const TriMesh& mesh, const ScalarFn& f) {
  std::vector<double> out(static_cast<std::size_t>(space.ndofs()));
  for (Index c = 0; c < mesh.num_cells(); ++c)
    out[static_cast<std::size_t>(c)] = f(mesh.cell_centroid(c));
  return out;
}

double eval_cont(const LagrangeSpace& space, std::span<const double> coeffs, Index cell,
                 const Vec2& ref) {
  double phi[kMaxLocalLagrange];
  lagrange_values(space.degree(), ref, std::span<double>(phi, kMaxLocalLagrange));
  const auto dofs = space.cell_dofs(cell);
  double v = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i)
    v += coeffs[static_cast<std::size_t>(dofs[i])] * phi[i];
  return v;
}

Vec2 eval_cont_grad(const LagrangeSpace& space, const TriMesh& mesh,
                    std::span<const double> coeffs, Index cell, const Vec2& ref) {
  Vec2 ref_grads[kMaxLocalLagrange];
  lagrange_ref_gradients(space.degree(), ref, std::span<Vec2>(ref_grads, kMaxLocalLagrange));
  const auto dofs = space.cell_dofs(cell);
  Vec2 r{0.0, 0.0};
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double c = coeffs[static_cast<std::size_t>(dofs[i])];
    r[0] += c * ref_grads[i][0];
    r[1] += c * ref_grads[i][1];
  }
  return mesh.cell_geometry(cell).push_gradient(r);
}

double eval_eg(const EGSpace& space, const EGFunction& u, Index cell, const Vec2& ref) {
  return eval_cont(space.cont(), u.cont(space), cell, ref) +
         u.constants(space)[static_cast<std::size_t>(cell)];
}

double eval_eg_at(const EGSpace& space, const TriMesh& mesh, const EGFunction& u,
                  const Vec2& x) {
  const Index n = mesh.subdivisions();
  const auto clampi = [n](double t) {
    return std::clamp(static_cast<Index>(std::floor(t * static_cast<double>(n))), Index{0},
                      n - 1);
  };
  const Index i = clampi(x[0]), j = clampi(x[1]);
  const double lx = x[0] * static_cast<double>(n) - static_cast<double>(i);
  const double ly = x[1] * static_cast<double>(n) - static_cast<double>(j);
  // Lower-right triangle of the square lies below its diagonal.
  const Index cell = 2 * (j * n + i) + (ly <= lx ? 0 : 1);
  const Vec2 ref = mesh.cell_geometry(cell).pull_back(x);
  return eval_eg(space, u, cell, ref);
}

}  // namespace iopeg
