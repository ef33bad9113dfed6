#pragma once

// Closed-form data for the benchmarks: piecewise-constant material
// coefficients, the singular potential S_lambda = r^lambda phi_lambda(theta)
// on the L-shaped domain whose gradient solves the transmission problem with
// eps = (eps_r, 1, eps_r), and a smooth divergence-free manufactured solution
// on the unit square.
//
// Conventions (fixed throughout): for a vector field v,
//   curl v = d1 v2 - d2 v1 (scalar),  v x n = v1 n2 - v2 n1,
// and for a scalar field w,  curl w = (d2 w, -d1 w).

#include "maxip/geometry.hpp"

#include <vector>

namespace maxip {

struct CoefficientField {
  std::vector<double> eps;     // index s-1 holds subdomain s
  std::vector<double> kappa;

  double eps_of(int subdomain) const { return eps.at(subdomain - 1); }
  double kappa_of(int subdomain) const { return kappa.at(subdomain - 1); }
};

// Throws unless both lists have one strictly positive entry per subdomain.
void validate_coefficients(const CoefficientField& c, int subdomain_count);

// eps = (eps_r, 1, eps_r) on subdomains 1..3, kappa = 1.
CoefficientField lshape_coefficients(double eps_r);
// eps = (1, eps_r, 1, eps_r) on subdomains 1..4, kappa = 1.
CoefficientField checkerboard_coefficients(double eps_r);
CoefficientField unit_coefficients(int subdomain_count);

// Transmission relation eps_r = tan(lambda pi/4) tan(lambda pi/2), strictly
// increasing from (0,1) onto (0,inf).  lambda_from_eps solves it by bisection
// plus a Newton polish.
double eps_from_lambda(double lambda);
double lambda_from_eps(double eps_r);

// Angular profile on [0, 3pi/2], continuous, vanishing at both ends, with
// eps-weighted normal-derivative continuity at theta = pi/2 and pi.
double phi_lambda(double lambda, double theta);
double dphi_lambda(double lambda, double theta);

struct SingularPotential {
  double lambda = 0.5;

  // theta(p) in [0, 3pi/2]; throws if |p| < origin_tol.
  static constexpr double origin_tol = 1e-14;
  double potential(const Vec2& p) const;          // S = r^lambda phi(theta)
  Vec2 grad(const Vec2& p) const;                 // E = grad S, the exact solution
  // One-sided value using the angular branch of the given L-shape subdomain;
  // the normal component of grad S jumps across the interface rays.
  Vec2 grad_from(const Vec2& p, int subdomain) const;
  Vec2 grad_or_zero(const Vec2& p) const;         // nodal convention at the origin
  // Tangential boundary trace E x n for outward normal n.
  double tangential_trace(const Vec2& p, const Vec2& n) const;
};

// Smooth benchmark on the unit square: E = curl(sin^2(pi x) sin^2(pi y)),
// divergence-free with E x n = 0 on the boundary; with kappa = eps = 1 the
// load is g = curl(curl E) and the multiplier vanishes.
Vec2 manufactured_field(const Vec2& p);
double manufactured_curl(const Vec2& p);
Vec2 manufactured_load(const Vec2& p);

}  // namespace maxip
