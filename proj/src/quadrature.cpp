#include "dlnsd/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace dlnsd {

namespace {

void add_orbit3(QuadratureRule& q, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  q.tri_points.push_back({a, a, b});
  q.tri_points.push_back({a, b, a});
  q.tri_points.push_back({b, a, a});
  for (int i = 0; i < 3; ++i) q.tri_weights.push_back(w);
}

void add_orbit6(QuadratureRule& q, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                        std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}}) {
    q.tri_points.push_back(p);
    q.tri_weights.push_back(w);
  }
}

void set_gauss_edge(QuadratureRule& q, int points) {
  std::vector<double> x, w;
  switch (points) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3:
      x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default: throw std::invalid_argument("unsupported edge rule");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    q.edge_points.push_back(0.5 * (x[i] + 1.0));
    q.edge_weights.push_back(0.5 * w[i]);
  }
  q.edge_degree = 2 * points - 1;
}

}  // namespace

QuadratureRule make_quadrature(int degree) {
  QuadratureRule q;
  switch (degree) {
    case 1:
      q.tri_points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
      q.tri_weights = {1.0};
      set_gauss_edge(q, 1);
      break;
    case 2:
      add_orbit3(q, 1.0 / 6.0, 1.0 / 3.0);
      set_gauss_edge(q, 2);
      break;
    case 4:
      // Dunavant 6-point rule.
      add_orbit3(q, 0.445948490915965, 0.223381589678011);
      add_orbit3(q, 0.091576213509771, 0.109951743655322);
      set_gauss_edge(q, 3);
      break;
    case 6:
      // Dunavant 12-point rule.
      add_orbit3(q, 0.249286745170910, 0.116786275726379);
      add_orbit3(q, 0.063089014491502, 0.050844906370207);
      add_orbit6(q, 0.053145049844817, 0.310352451033784, 0.082851075618374);
      set_gauss_edge(q, 4);
      break;
    default: throw std::invalid_argument("unsupported triangle quadrature degree");
  }
  q.tri_degree = degree;
  return q;
}

const QuadratureRule& default_quadrature() {
  static const QuadratureRule rule = make_quadrature(6);
  return rule;
}

}  // namespace dlnsd
