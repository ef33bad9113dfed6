#pragma once

// Discrete spaces for the penalized Maxwell system on a partitioned mesh:
//
//   X_h: vector Lagrange elements of degree ell-1, continuous inside each
//        subdomain, fully discontinuous across the subdomain interface, no
//        boundary conditions.  Nodes on the interface carry one degree of
//        freedom per adjacent subdomain (four copies at a checkerboard
//        center).
//   M_h: scalar Lagrange multipliers, globally continuous, eliminated on the
//        domain boundary.  Same degree as X_h by default; degree 1 can be
//        requested when ell = 3.
//
// Degree-of-freedom numbering is deterministic: X_h slots ordered
// lexicographically by (subdomain, node id), components interleaved; M_h by
// node id.

#include "maxip/geometry.hpp"
#include "maxip/quadrature.hpp"

#include <functional>
#include <vector>

namespace maxip {

// Scalar Lagrange basis on the reference triangle, degree 1 or 2.
// Node order: vertices (0,0),(1,0),(0,1), then midpoints of edges
// (v0,v1),(v1,v2),(v2,v0) for degree 2.
int basis_count(int degree);
void eval_basis(int degree, const Vec2& xhat, double* values, Vec2* gradients);

struct TriGeometry {
  Vec2 v0;
  Eigen::Matrix2d jac;      // [v1-v0, v2-v0]
  Eigen::Matrix2d inv_jac_t;
  double det = 0.0;         // = 2*area > 0
  Vec2 map(const Vec2& xhat) const { return v0 + jac * xhat; }
  Vec2 unmap(const Vec2& x) const { return jac.inverse() * (x - v0); }
};
TriGeometry tri_geometry(const Mesh& mesh, int t);

struct FeSystem {
  Mesh mesh;
  int ell = 2;         // >= 2
  int degree = 1;      // = ell - 1, degree of X_h
  int mh_degree = 1;   // degree of M_h: ell-1 by default, 1 on request

  int n_xh = 0;        // vector dofs (2 per slot)
  int n_mh = 0;

  // Geometric nodes: vertices first, then one node per mesh edge for degree 2.
  std::vector<Vec2> node_pos;
  std::vector<char> node_on_boundary;

  // Per triangle: global node ids in local order (3 or 6 used).
  std::vector<std::array<int, 6>> tri_nodes;
  // Per triangle: X_h slot of each local node; dof = 2*slot + component.
  std::vector<std::array<int, 6>> xh_slot;
  // Per triangle: M_h dof of each local M_h node (3 or 6 used), -1 on the boundary.
  std::vector<std::array<int, 6>> mh_dof;

  // Per X_h slot: owning node and subdomain (interpolation, diagnostics).
  std::vector<int> slot_node;
  std::vector<int> slot_subdomain;
  // Per M_h dof: owning node.
  std::vector<int> mh_node;

  int nodes_per_tri() const { return basis_count(degree); }
  int mh_nodes_per_tri() const { return basis_count(mh_degree); }
  int total_dofs() const { return n_xh + n_mh; }
};

// mh_degree = 0 selects the default (ell - 1).
FeSystem build_system(const Mesh& mesh, int ell, int mh_degree = 0);

struct DiscreteField {
  Eigen::VectorXd e;   // size n_xh
  Eigen::VectorXd p;   // size n_mh
};
DiscreteField zero_field(const FeSystem& fe);

// Nodal interpolation.  The vector field is evaluated per subdomain so the
// caller controls one-sided limits on the interface; the scalar field must be
// single-valued (M_h is continuous).  Pass a null scalar function for p = 0.
using VectorBySubdomain = std::function<Vec2(const Vec2&, int subdomain)>;
using ScalarFunction = std::function<double(const Vec2&)>;
DiscreteField interpolate(const FeSystem& fe, const VectorBySubdomain& f,
                          const ScalarFunction& g = nullptr);

// Pointwise evaluation on triangle t at reference coordinates xhat.
struct FieldValue {
  Vec2 value = Vec2::Zero();
  double curl = 0.0;   // d1 v2 - d2 v1
  double div = 0.0;
};
FieldValue eval_field(const FeSystem& fe, const Eigen::VectorXd& e, int t, const Vec2& xhat);
double eval_multiplier(const FeSystem& fe, const Eigen::VectorXd& p, int t, const Vec2& xhat);
Vec2 eval_multiplier_gradient(const FeSystem& fe, const Eigen::VectorXd& p, int t,
                              const Vec2& xhat);

}  // namespace maxip
