#include "maxip/fe_space.hpp"

#include <map>
#include <stdexcept>

namespace maxip {

int basis_count(int degree) {
  if (degree == 1) return 3;
  if (degree == 2) return 6;
  throw std::invalid_argument("basis_count: only degrees 1 and 2 are supported");
}

void eval_basis(int degree, const Vec2& xhat, double* values, Vec2* gradients) {
  const double x = xhat.x(), y = xhat.y();
  const double l0 = 1.0 - x - y, l1 = x, l2 = y;
  static const Vec2 dl0(-1.0, -1.0), dl1(1.0, 0.0), dl2(0.0, 1.0);
  if (degree == 1) {
    values[0] = l0;
    values[1] = l1;
    values[2] = l2;
    if (gradients) {
      gradients[0] = dl0;
      gradients[1] = dl1;
      gradients[2] = dl2;
    }
    return;
  }
  if (degree != 2) throw std::invalid_argument("eval_basis: only degrees 1 and 2");
  values[0] = l0 * (2 * l0 - 1);
  values[1] = l1 * (2 * l1 - 1);
  values[2] = l2 * (2 * l2 - 1);
  values[3] = 4 * l0 * l1;
  values[4] = 4 * l1 * l2;
  values[5] = 4 * l2 * l0;
  if (gradients) {
    gradients[0] = (4 * l0 - 1) * dl0;
    gradients[1] = (4 * l1 - 1) * dl1;
    gradients[2] = (4 * l2 - 1) * dl2;
    gradients[3] = 4 * (l1 * dl0 + l0 * dl1);
    gradients[4] = 4 * (l2 * dl1 + l1 * dl2);
    gradients[5] = 4 * (l0 * dl2 + l2 * dl0);
  }
}

TriGeometry tri_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  TriGeometry g;
  g.v0 = mesh.vertices[tri.v[0]];
  g.jac.col(0) = mesh.vertices[tri.v[1]] - g.v0;
  g.jac.col(1) = mesh.vertices[tri.v[2]] - g.v0;
  g.det = g.jac.determinant();
  if (g.det <= 0) throw std::runtime_error("tri_geometry: non-positive Jacobian");
  g.inv_jac_t = g.jac.inverse().transpose();
  return g;
}

FeSystem build_system(const Mesh& mesh, int ell, int mh_degree) {
  if (ell < 2 || ell > 3)
    throw std::invalid_argument("build_system: ell must be 2 or 3 (degree 1 or 2)");
  const int degree = ell - 1;
  if (mh_degree == 0) mh_degree = degree;
  if (mh_degree != degree && !(mh_degree == 1 && degree == 2))
    throw std::invalid_argument("build_system: M_h degree must equal the X_h degree, or 1");
  if (mesh.edges.empty() && mesh.num_triangles() > 0)
    throw std::invalid_argument("build_system: mesh edges are not classified");

  FeSystem fe;
  fe.mesh = mesh;
  fe.ell = ell;
  fe.degree = degree;
  fe.mh_degree = mh_degree;

  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int n_nodes = degree == 1 ? nv : nv + ne;

  fe.node_pos.resize(n_nodes);
  for (int v = 0; v < nv; ++v) fe.node_pos[v] = mesh.vertices[v];
  std::map<std::pair<int, int>, int> edge_index;
  for (int e = 0; e < ne; ++e) {
    edge_index[{mesh.edges[e].a, mesh.edges[e].b}] = e;
    if (degree == 2)
      fe.node_pos[nv + e] = 0.5 * (mesh.vertices[mesh.edges[e].a] + mesh.vertices[mesh.edges[e].b]);
  }

  fe.node_on_boundary.assign(n_nodes, 0);
  for (int e = 0; e < ne; ++e) {
    if (mesh.edges[e].kind != EdgeKind::boundary) continue;
    fe.node_on_boundary[mesh.edges[e].a] = 1;
    fe.node_on_boundary[mesh.edges[e].b] = 1;
    if (degree == 2) fe.node_on_boundary[nv + e] = 1;
  }

  const int nt = mesh.num_triangles();
  fe.tri_nodes.assign(nt, {-1, -1, -1, -1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) fe.tri_nodes[t][k] = tri.v[k];
    if (degree == 2) {
      for (int k = 0; k < 3; ++k) {
        int a = tri.v[k], b = tri.v[(k + 1) % 3];
        if (a > b) std::swap(a, b);
        fe.tri_nodes[t][3 + k] = nv + edge_index.at({a, b});
      }
    }
  }

  // X_h slots: one per (subdomain, node) incidence, ordered lexicographically.
  std::vector<std::vector<int>> node_subs(n_nodes);
  const int npt = fe.nodes_per_tri();
  for (int t = 0; t < nt; ++t) {
    const int s = mesh.triangles[t].subdomain;
    for (int k = 0; k < npt; ++k) {
      auto& subs = node_subs[fe.tri_nodes[t][k]];
      bool found = false;
      for (int x : subs) found = found || (x == s);
      if (!found) subs.push_back(s);
    }
  }
  std::map<std::pair<int, int>, int> slot_of;   // (subdomain, node) -> slot
  for (int node = 0; node < n_nodes; ++node) {
    for (int s : node_subs[node]) slot_of[{s, node}] = 0;
  }
  int n_slots = 0;
  fe.slot_node.clear();
  fe.slot_subdomain.clear();
  for (auto& [key, slot] : slot_of) {
    slot = n_slots++;
    fe.slot_subdomain.push_back(key.first);
    fe.slot_node.push_back(key.second);
  }
  fe.n_xh = 2 * n_slots;

  fe.xh_slot.assign(nt, {-1, -1, -1, -1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const int s = mesh.triangles[t].subdomain;
    for (int k = 0; k < npt; ++k) fe.xh_slot[t][k] = slot_of.at({s, fe.tri_nodes[t][k]});
  }

  // M_h: shared dofs at nodes of the multiplier degree, boundary eliminated.
  const int n_mh_nodes = mh_degree == 1 ? nv : n_nodes;
  std::vector<int> mh_of_node(n_mh_nodes, -1);
  int n_mh = 0;
  for (int node = 0; node < n_mh_nodes; ++node) {
    if (node_subs[node].empty()) continue;   // vertex not referenced by any triangle
    if (fe.node_on_boundary[node]) continue;
    mh_of_node[node] = n_mh++;
    fe.mh_node.push_back(node);
  }
  fe.n_mh = n_mh;
  fe.mh_dof.assign(nt, {-1, -1, -1, -1, -1, -1});
  const int mpt = fe.mh_nodes_per_tri();
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < mpt; ++k) fe.mh_dof[t][k] = mh_of_node[fe.tri_nodes[t][k]];
  }
  return fe;
}

DiscreteField zero_field(const FeSystem& fe) {
  DiscreteField x;
  x.e = Eigen::VectorXd::Zero(fe.n_xh);
  x.p = Eigen::VectorXd::Zero(fe.n_mh);
  return x;
}

DiscreteField interpolate(const FeSystem& fe, const VectorBySubdomain& f,
                          const ScalarFunction& g) {
  DiscreteField x = zero_field(fe);
  if (f) {
    for (size_t slot = 0; slot < fe.slot_node.size(); ++slot) {
      const Vec2 v = f(fe.node_pos[fe.slot_node[slot]], fe.slot_subdomain[slot]);
      x.e[2 * slot] = v.x();
      x.e[2 * slot + 1] = v.y();
    }
  }
  if (g) {
    for (int d = 0; d < fe.n_mh; ++d) x.p[d] = g(fe.node_pos[fe.mh_node[d]]);
  }
  return x;
}

FieldValue eval_field(const FeSystem& fe, const Eigen::VectorXd& e, int t, const Vec2& xhat) {
  const TriGeometry g = tri_geometry(fe.mesh, t);
  double n[6];
  Vec2 dn[6];
  eval_basis(fe.degree, xhat, n, dn);
  FieldValue out;
  for (int k = 0; k < fe.nodes_per_tri(); ++k) {
    const int slot = fe.xh_slot[t][k];
    const double cx = e[2 * slot], cy = e[2 * slot + 1];
    const Vec2 grad = g.inv_jac_t * dn[k];
    out.value.x() += cx * n[k];
    out.value.y() += cy * n[k];
    out.curl += cy * grad.x() - cx * grad.y();
    out.div += cx * grad.x() + cy * grad.y();
  }
  return out;
}

double eval_multiplier(const FeSystem& fe, const Eigen::VectorXd& p, int t, const Vec2& xhat) {
  double n[6];
  eval_basis(fe.mh_degree, xhat, n, nullptr);
  double out = 0;
  for (int k = 0; k < fe.mh_nodes_per_tri(); ++k) {
    const int dof = fe.mh_dof[t][k];
    if (dof >= 0) out += p[dof] * n[k];
  }
  return out;
}

Vec2 eval_multiplier_gradient(const FeSystem& fe, const Eigen::VectorXd& p, int t,
                              const Vec2& xhat) {
  const TriGeometry g = tri_geometry(fe.mesh, t);
  double n[6];
  Vec2 dn[6];
  eval_basis(fe.mh_degree, xhat, n, dn);
  Vec2 out = Vec2::Zero();
  for (int k = 0; k < fe.mh_nodes_per_tri(); ++k) {
    const int dof = fe.mh_dof[t][k];
    if (dof >= 0) out += p[dof] * (g.inv_jac_t * dn[k]);
  }
  return out;
}

}  // namespace maxip
