#include "maxip/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxip {

using std::numbers::pi;

void validate_coefficients(const CoefficientField& c, int subdomain_count) {
  if (static_cast<int>(c.eps.size()) != subdomain_count ||
      static_cast<int>(c.kappa.size()) != subdomain_count)
    throw std::invalid_argument("coefficients: need one eps and kappa per subdomain");
  for (double v : c.eps)
    if (!(v > 0)) throw std::invalid_argument("coefficients: eps must be strictly positive");
  for (double v : c.kappa)
    if (!(v > 0)) throw std::invalid_argument("coefficients: kappa must be strictly positive");
}

CoefficientField lshape_coefficients(double eps_r) {
  return {{eps_r, 1.0, eps_r}, {1.0, 1.0, 1.0}};
}

CoefficientField checkerboard_coefficients(double eps_r) {
  return {{1.0, eps_r, 1.0, eps_r}, {1.0, 1.0, 1.0, 1.0}};
}

CoefficientField unit_coefficients(int subdomain_count) {
  return {std::vector<double>(subdomain_count, 1.0), std::vector<double>(subdomain_count, 1.0)};
}

double eps_from_lambda(double lambda) {
  if (!(lambda > 0 && lambda < 1))
    throw std::invalid_argument("eps_from_lambda: lambda must lie in (0,1)");
  return std::tan(lambda * pi / 4) * std::tan(lambda * pi / 2);
}

double lambda_from_eps(double eps_r) {
  if (!(eps_r > 0)) throw std::invalid_argument("lambda_from_eps: eps_r must be positive");
  double lo = 1e-12, hi = 1.0 - 1e-12;
  if (eps_from_lambda(hi) < eps_r)
    throw std::invalid_argument("lambda_from_eps: eps_r out of the resolvable range");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eps_from_lambda(mid) < eps_r ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double a = x * pi / 4, b = x * pi / 2;
    const double f = std::tan(a) * std::tan(b) - eps_r;
    const double df = (pi / 4) / (std::cos(a) * std::cos(a)) * std::tan(b) +
                      std::tan(a) * (pi / 2) / (std::cos(b) * std::cos(b));
    x -= f / df;
  }
  return x;
}

namespace {

// Formulas per angular sector; sector s covers theta in [(s-1) pi/2, s pi/2]
// and coincides with L-shape subdomain s.
double phi_branch(double lambda, double theta, int sector) {
  switch (sector) {
    case 1: return std::sin(lambda * theta);
    case 2:
      return std::sin(lambda * pi / 2) / std::cos(lambda * pi / 4) *
             std::cos(lambda * (theta - 0.75 * pi));
    case 3: return std::sin(lambda * (1.5 * pi - theta));
  }
  throw std::invalid_argument("phi_branch: sector must be 1, 2 or 3");
}

double dphi_branch(double lambda, double theta, int sector) {
  switch (sector) {
    case 1: return lambda * std::cos(lambda * theta);
    case 2:
      return -lambda * std::sin(lambda * pi / 2) / std::cos(lambda * pi / 4) *
             std::sin(lambda * (theta - 0.75 * pi));
    case 3: return -lambda * std::cos(lambda * (1.5 * pi - theta));
  }
  throw std::invalid_argument("dphi_branch: sector must be 1, 2 or 3");
}

int sector_of(double theta) {
  if (theta < 0 || theta > 1.5 * pi + 1e-12)
    throw std::invalid_argument("singular potential: theta outside [0, 3pi/2]");
  if (theta < 0.5 * pi) return 1;
  if (theta < pi) return 2;
  return 3;
}

double sector_angle(const Vec2& p) {
  double theta = std::atan2(p.y(), p.x());
  if (theta < 0) theta += 2 * pi;   // maps onto [0, 2pi); the L-shape uses [0, 3pi/2]
  return theta;
}

}  // namespace

// Branches chosen so that phi is continuous, vanishes at 0 and 3pi/2, and the
// eps-weighted normal derivative matches at pi/2 and pi for
// eps = (eps_from_lambda, 1, eps_from_lambda).
double phi_lambda(double lambda, double theta) {
  return phi_branch(lambda, theta, sector_of(theta));
}

double dphi_lambda(double lambda, double theta) {
  return dphi_branch(lambda, theta, sector_of(theta));
}

double SingularPotential::potential(const Vec2& p) const {
  const double r = p.norm();
  if (r < origin_tol) return 0.0;
  return std::pow(r, lambda) * phi_lambda(lambda, sector_angle(p));
}

Vec2 SingularPotential::grad(const Vec2& p) const {
  const double r = p.norm();
  if (r < origin_tol)
    throw std::domain_error("SingularPotential::grad: gradient is singular at the origin");
  return grad_from(p, sector_of(sector_angle(p)));
}

Vec2 SingularPotential::grad_from(const Vec2& p, int subdomain) const {
  const double r = p.norm();
  if (r < origin_tol)
    throw std::domain_error("SingularPotential::grad: gradient is singular at the origin");
  const double theta = sector_angle(p);
  const double f = phi_branch(lambda, theta, subdomain);
  const double df = dphi_branch(lambda, theta, subdomain);
  const Vec2 er = p / r;
  const Vec2 et(-er.y(), er.x());
  return std::pow(r, lambda - 1.0) * (lambda * f * er + df * et);
}

Vec2 SingularPotential::grad_or_zero(const Vec2& p) const {
  return p.norm() < origin_tol ? Vec2::Zero() : grad(p);
}

double SingularPotential::tangential_trace(const Vec2& p, const Vec2& n) const {
  const Vec2 e = grad_or_zero(p);
  return e.x() * n.y() - e.y() * n.x();
}

Vec2 manufactured_field(const Vec2& p) {
  const double s = std::sin(pi * p.x()), c = std::cos(pi * p.x());
  const double t = std::sin(pi * p.y()), u = std::cos(pi * p.y());
  // curl of psi = sin^2(pi x) sin^2(pi y): (d2 psi, -d1 psi)
  return Vec2(2 * pi * s * s * t * u, -2 * pi * s * c * t * t);
}

double manufactured_curl(const Vec2& p) {
  const double s = std::sin(pi * p.x()), t = std::sin(pi * p.y());
  const double c2x = std::cos(2 * pi * p.x()), c2y = std::cos(2 * pi * p.y());
  return -2 * pi * pi * (c2x * t * t + s * s * c2y);
}

Vec2 manufactured_load(const Vec2& p) {
  const double s = std::sin(pi * p.x()), t = std::sin(pi * p.y());
  const double s2x = std::sin(2 * pi * p.x()), s2y = std::sin(2 * pi * p.y());
  const double c2x = std::cos(2 * pi * p.x()), c2y = std::cos(2 * pi * p.y());
  const double p3 = pi * pi * pi;
  // g = curl(curl E) with w = curl E from manufactured_curl
  const double dw_dy = -2 * p3 * c2x * s2y + 4 * p3 * s * s * s2y;
  const double dw_dx = 4 * p3 * s2x * t * t - 2 * p3 * s2x * c2y;
  return Vec2(dw_dy, -dw_dx);
}

}  // namespace maxip
