#pragma once

// Assembly of the interior-penalty bilinear form for the two-field system
// (E, p) in X_h x M_h:
//
//   a_h((E,p),(F,q)) =
//       (kappa curl E, curl F)
//     + ({kappa curl E}, [F x n])_{Sigma u Gamma}
//     + theta ({kappa curl F}, [E x n])_{Sigma u Gamma}
//     + gamma h^-1 ({kappa} [E x n], [F x n])_{Sigma u Gamma}
//     + (eps grad p, F) - (eps E, grad q)
//     + c_alpha [ h^{2 alpha}    (div eps E, div eps F)
//               + h^{2(1-alpha)} (eps grad p, grad q)
//               + h^{2 alpha-1}  ([eps E . n], [eps F . n])_Sigma ]
//
// Jumps and averages live only on interface and boundary edges; on the
// boundary both are one-sided.  The edge coefficient {kappa} is the
// arithmetic mean of the one-sided values.  h is the global mesh size by
// default (a per-entity variant is available behind a flag).
//
// Nonhomogeneous tangential data E x n = g_t enters weakly: the right-hand
// side gains theta ({kappa curl F}, g_t)_Gamma + gamma h^-1 ({kappa} g_t, F x n)_Gamma.
//
// The eigenvalue pencil (A', B') applies the sign flip q -> -q to the test
// multiplier: A' is then symmetric, and
//   B'((E,p),(E,p)) = || eps^{1/2} (E - c grad p) ||^2,  c = c_alpha h^{2(1-alpha)},
// is positive semidefinite.  The pencil requires theta = 1, and alpha < 1
// unless the pollution-study flag is set.

#include "maxip/analytic.hpp"
#include "maxip/fe_space.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <iosfwd>

namespace maxip {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct PenaltyParams {
  double alpha = 1.0;      // in [0, 1]
  double gamma = 10.0;     // > 0
  double c_alpha = 1.0;    // > 0
  double theta = 1.0;      // in {-1, 0, 1}
  bool local_h = false;    // use per-edge / per-triangle h in the weights
};
void validate_params(const PenaltyParams& p);

// Individual terms of a_h, for diagnostics and term-wise testing.
enum Term : std::uint32_t {
  term_curl_curl = 1u << 0,
  term_consistency = 1u << 1,      // ({kappa curl E}, [F x n])
  term_adjoint_consistency = 1u << 2,  // theta ({kappa curl F}, [E x n])
  term_tangential_penalty = 1u << 3,
  term_grad_p = 1u << 4,           // (eps grad p, F)
  term_constraint = 1u << 5,       // -(eps E, grad q)
  term_div_penalty = 1u << 6,
  term_grad_grad = 1u << 7,
  term_normal_jump = 1u << 8,
  term_all = 0x1ffu,
};

SparseMatrix assemble_ah(const FeSystem& fe, const CoefficientField& coeffs,
                         const PenaltyParams& params, std::uint32_t terms = term_all);

// Right-hand side for volume load g (may be null) and tangential boundary
// data g_t(point, outward normal) (may be null for the homogeneous case).
using BoundaryTrace = std::function<double(const Vec2&, const Vec2&)>;
Eigen::VectorXd assemble_rhs(const FeSystem& fe, const CoefficientField& coeffs,
                             const PenaltyParams& params, const VectorBySubdomain& g,
                             const BoundaryTrace& g_t);

struct Pencil {
  SparseMatrix a;   // sign-flipped a_h matrix, symmetric
  SparseMatrix b;   // eps-mass of E - c grad p, symmetric positive semidefinite
  double c = 0.0;   // c_alpha h^{2(1-alpha)}
};
Pencil assemble_pencil(const FeSystem& fe, const CoefficientField& coeffs,
                       const PenaltyParams& params, bool allow_alpha_one = false);

// || (F, q) ||_h^2: curl, tangential-jump, div, multiplier-gradient and
// normal-jump contributions with the weights of a_h.  Equals a_h(x, x) when
// theta = -1.
double discrete_norm_squared(const FeSystem& fe, const CoefficientField& coeffs,
                             const PenaltyParams& params, const DiscreteField& x);

// (eps u, v) over the mesh for broken fields given per triangle.
double eps_inner_product(const FeSystem& fe, const CoefficientField& coeffs,
                         const DiscreteField& u, const DiscreteField& v, double c_u,
                         double c_v);

// Coordinate text format, one "row col value" line per entry, 0-based.
void dump_matrix(const SparseMatrix& m, std::ostream& out);

}  // namespace maxip
