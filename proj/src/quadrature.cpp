#include "quadrature.hpp"

#include <numbers>

namespace iopeg {

void gauss_legendre(int npoints, std::vector<double>& points, std::vector<double>& weights) {
  require(npoints >= 1, ErrorCode::InvalidArgument, "gauss_legendre: need at least one point");
  const auto n = static_cast<std::size_t>(npoints);
  points.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; store in ascending order.
    points[i] = 0.5 * (1.0 - x);
    points[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

QuadratureRule make_quadrature(int tri_degree, int edge_degree) {
  require(tri_degree >= 0 && tri_degree <= kMaxQuadratureDegree, ErrorCode::InvalidArgument,
          "unsupported triangle quadrature degree " + std::to_string(tri_degree));
  require(edge_degree >= 0 && edge_degree <= kMaxQuadratureDegree, ErrorCode::InvalidArgument,
          "unsupported edge quadrature degree " + std::to_string(edge_degree));
  QuadratureRule q;
  q.tri_degree = tri_degree;
  q.edge_degree = edge_degree;

  if (tri_degree <= 1) {
    q.tri_points = {{1.0 / 3.0, 1.0 / 3.0}};
    q.tri_weights = {0.5};
  } else if (tri_degree == 2) {
    q.tri_points = {{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
    q.tri_weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  } else {
    // x = s, y = t (1 - s); the Jacobian (1 - s) adds one degree in s.
    std::vector<double> ps, ws, pt, wt;
    gauss_legendre((tri_degree + 2 + 1) / 2, ps, ws);
    gauss_legendre((tri_degree + 1 + 1) / 2, pt, wt);
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = 0; b < pt.size(); ++b) {
        q.tri_points.push_back({ps[a], pt[b] * (1.0 - ps[a])});
        q.tri_weights.push_back(ws[a] * wt[b] * (1.0 - ps[a]));
      }
  }
  gauss_legendre(std::max(1, (edge_degree + 2) / 2), q.edge_points, q.edge_weights);
  return q;
}

}  // namespace iopeg
