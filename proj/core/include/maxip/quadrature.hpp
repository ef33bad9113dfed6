#pragma once

// Quadrature on the reference triangle {x,y >= 0, x+y <= 1} and the
// reference edge [0,1].  Triangle rules are conical products (Gauss-Jacobi
// with weight u in the radial direction times Gauss-Legendre), so arbitrary
// exactness degrees are available without coefficient tables.  All weights
// are positive; triangle weights sum to 1/2, edge weights to 1.

#include "maxip/geometry.hpp"

#include <vector>

namespace maxip {

struct TriangleRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

struct EdgeRule {
  std::vector<double> points;   // in [0,1]
  std::vector<double> weights;
  int exact_degree = 0;
};

// n x n conical product rule, exact for total degree 2n-1.
TriangleRule conical_rule(int n);

// Smallest conical rule exact for at least the given total degree.
TriangleRule triangle_rule(int min_degree);

// Gauss-Legendre with n points mapped to [0,1], exact for degree 2n-1.
EdgeRule gauss_legendre(int n);
EdgeRule edge_rule(int min_degree);

}  // namespace maxip
