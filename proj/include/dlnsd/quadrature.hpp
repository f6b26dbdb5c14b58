#pragma once

#include <array>
#include <vector>

namespace dlnsd {

/// Points in barycentric coordinates on the reference triangle, weights
/// normalized to sum to 1 (multiply by the triangle area). The edge rule uses
/// the parameter s in [0,1] with weights summing to 1 (multiply by length).
struct QuadratureRule {
  std::vector<std::array<double, 3>> tri_points;
  std::vector<double> tri_weights;
  std::vector<double> edge_points;
  std::vector<double> edge_weights;
  int tri_degree = 0;
  int edge_degree = 0;
};

/// Symmetric triangle rule exact to the requested degree (1, 2, 4 or 6),
/// paired with a Gauss-Legendre edge rule of at least the same degree.
QuadratureRule make_quadrature(int degree);

/// Rule used for assembly and error norms.
const QuadratureRule& default_quadrature();

}  // namespace dlnsd
