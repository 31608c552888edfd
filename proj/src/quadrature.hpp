#pragma once

#include <vector>

#include "common.hpp"

namespace iopeg {

/// Rules on the reference triangle (0,0),(1,0),(0,1) and the reference
/// edge [0,1].
struct QuadratureRule {
  std::vector<Vec2> tri_points;
  std::vector<double> tri_weights;  // sum to 1/2
  std::vector<double> edge_points;
  std::vector<double> edge_weights;  // sum to 1
  int tri_degree = 0;
  int edge_degree = 0;
};

inline constexpr int kMaxQuadratureDegree = 20;

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int npoints, std::vector<double>& points, std::vector<double>& weights);

/// Triangle rule exact to `tri_degree`, edge rule exact to `edge_degree`.
/// Degrees 1 and 2 on the triangle use the centroid and edge-midpoint rules;
/// higher degrees use a collapsed Gauss product rule.
QuadratureRule make_quadrature(int tri_degree, int edge_degree);

}  // namespace iopeg
