#include "maxip/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace maxip {

namespace {

// Golub-Welsch nodes/weights on [-1,1] for the Jacobi weight
// (1-x)^wa (1+x)^wb, from the symmetrized three-term recurrence.
void gauss_jacobi(int n, double wa, double wb, std::vector<double>& x,
                  std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  const double s = wa + wb;
  for (int k = 0; k < n; ++k) {
    const double den = (2 * k + s) * (2 * k + s + 2);
    jac(k, k) = (k == 0 && s == 0) ? 0.0 : (wb * wb - wa * wa) / den;
  }
  for (int k = 1; k < n; ++k) {
    const double num = 4.0 * k * (k + wa) * (k + wb) * (k + s);
    const double den = (2 * k + s) * (2 * k + s) * (2 * k + s + 1) * (2 * k + s - 1);
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(num / den);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  // mu0 = int_{-1}^{1} (1-x)^wa (1+x)^wb dx = 2^{wa+wb+1} B(wa+1, wb+1)
  const double mu0 = std::pow(2.0, s + 1) * std::exp(std::lgamma(wa + 1) + std::lgamma(wb + 1) -
                                                     std::lgamma(s + 2));
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

}  // namespace

EdgeRule gauss_legendre(int n) {
  std::vector<double> x, w;
  gauss_jacobi(n, 0.0, 0.0, x, w);
  EdgeRule rule;
  rule.exact_degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

EdgeRule edge_rule(int min_degree) {
  return gauss_legendre(std::max(1, (min_degree + 2) / 2));
}

TriangleRule conical_rule(int n) {
  // Collapsed map (u,v) in [0,1]^2 -> (u(1-v), uv) with Jacobian u: radial
  // direction needs the weight u, handled by Gauss-Jacobi (0,1).
  std::vector<double> xu, wu, xv, wv;
  gauss_jacobi(n, 0.0, 1.0, xu, wu);
  gauss_jacobi(n, 0.0, 0.0, xv, wv);
  TriangleRule rule;
  rule.exact_degree = 2 * n - 1;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (xu[i] + 1.0);
    const double cu = 0.25 * wu[i];   // node map plus weight-function scaling
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (xv[j] + 1.0);
      rule.points.emplace_back(u * (1.0 - v), u * v);
      rule.weights.push_back(cu * 0.5 * wv[j]);
    }
  }
  return rule;
}

TriangleRule triangle_rule(int min_degree) {
  return conical_rule(std::max(1, (min_degree + 2) / 2));
}

}  // namespace maxip
