#include "maxip/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace maxip {

void validate_params(const PenaltyParams& p) {
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
    throw std::invalid_argument("params: alpha must lie in [0,1]");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("params: gamma must be positive");
  if (!(p.c_alpha > 0.0)) throw std::invalid_argument("params: c_alpha must be positive");
  if (p.theta != -1.0 && p.theta != 0.0 && p.theta != 1.0)
    throw std::invalid_argument("params: theta must be -1, 0 or 1");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Reference-rule basis tables shared by every triangle.
struct BasisTable {
  std::vector<std::array<double, 6>> n;
  std::vector<std::array<Vec2, 6>> dn;
  void build(int degree, const std::vector<Vec2>& pts) {
    n.resize(pts.size());
    dn.resize(pts.size());
    for (size_t q = 0; q < pts.size(); ++q)
      eval_basis(degree, pts[q], n[q].data(), dn[q].data());
  }
};

struct EdgeGeometry {
  Vec2 pa, pb;
  double length = 0;
  Vec2 normal;          // outward from side 0
  int tri[2] = {-1, -1};
  int sub[2] = {0, 0};
  int sides = 1;
};

EdgeGeometry edge_geometry(const Mesh& mesh, const Edge& e) {
  EdgeGeometry g;
  g.pa = mesh.vertices[e.a];
  g.pb = mesh.vertices[e.b];
  const Vec2 d = g.pb - g.pa;
  g.length = d.norm();
  g.normal = Vec2(d.y(), -d.x()) / g.length;
  const auto& t0 = mesh.triangles[e.tri[0]];
  const Vec2 centroid =
      (mesh.vertices[t0.v[0]] + mesh.vertices[t0.v[1]] + mesh.vertices[t0.v[2]]) / 3.0;
  if (g.normal.dot(0.5 * (g.pa + g.pb) - centroid) < 0) g.normal = -g.normal;
  g.tri[0] = e.tri[0];
  g.sub[0] = t0.subdomain;
  if (e.tri[1] >= 0) {
    g.sides = 2;
    g.tri[1] = e.tri[1];
    g.sub[1] = mesh.triangles[e.tri[1]].subdomain;
  }
  return g;
}

double longest_edge_of(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2& a = mesh.vertices[tri.v[0]];
  const Vec2& b = mesh.vertices[tri.v[1]];
  const Vec2& c = mesh.vertices[tri.v[2]];
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

void emit_local(const Eigen::MatrixXd& local, const std::vector<int>& dofs, Triplets& trip) {
  const int m = static_cast<int>(dofs.size());
  for (int i = 0; i < m; ++i) {
    if (dofs[i] < 0) continue;
    for (int j = 0; j < m; ++j) {
      if (dofs[j] < 0) continue;
      const double v = local(i, j);
      if (v != 0.0) trip.emplace_back(dofs[i], dofs[j], v);
    }
  }
}

}  // namespace

SparseMatrix assemble_ah(const FeSystem& fe, const CoefficientField& coeffs,
                         const PenaltyParams& params, std::uint32_t terms) {
  validate_params(params);
  validate_coefficients(coeffs, fe.mesh.subdomain_count);

  const Mesh& mesh = fe.mesh;
  const int n = fe.total_dofs();
  const int npt = fe.nodes_per_tri();
  const int mpt = fe.mh_nodes_per_tri();
  const int nloc = 2 * npt + mpt;
  const double h_global = mesh.h;
  const double ca = params.c_alpha, alpha = params.alpha;

  const TriangleRule cell = triangle_rule(2 * (fe.ell - 1) + 2);
  BasisTable bx, bm;
  bx.build(fe.degree, cell.points);
  bm.build(fe.mh_degree, cell.points);

  Triplets trip;
  trip.reserve(static_cast<size_t>(mesh.num_triangles()) * nloc * nloc);

  // ---- cell terms: local dof order [E (node, comp) pairs, then p nodes] ----
  Eigen::MatrixXd local(nloc, nloc);
  std::vector<int> dofs(nloc);
  std::vector<Vec2> gx(npt), gm(mpt);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry geo = tri_geometry(mesh, t);
    const int sub = mesh.triangles[t].subdomain;
    const double eps = coeffs.eps_of(sub), kappa = coeffs.kappa_of(sub);
    const double h_cell = params.local_h ? longest_edge_of(mesh, t) : h_global;
    const double w_div = ca * std::pow(h_cell, 2 * alpha) * eps * eps;
    const double w_gg = ca * std::pow(h_cell, 2 * (1 - alpha)) * eps;

    for (int k = 0; k < npt; ++k) {
      dofs[2 * k] = 2 * fe.xh_slot[t][k];
      dofs[2 * k + 1] = 2 * fe.xh_slot[t][k] + 1;
    }
    for (int j = 0; j < mpt; ++j) {
      const int pj = fe.mh_dof[t][j];
      dofs[2 * npt + j] = pj < 0 ? -1 : fe.n_xh + pj;
    }
    local.setZero();

    for (size_t q = 0; q < cell.points.size(); ++q) {
      const double w = cell.weights[q] * geo.det;
      for (int k = 0; k < npt; ++k) gx[k] = geo.inv_jac_t * bx.dn[q][k];
      for (int k = 0; k < mpt; ++k) gm[k] = geo.inv_jac_t * bm.dn[q][k];

      if (terms & (term_curl_curl | term_div_penalty)) {
        for (int k = 0; k < npt; ++k) {
          // curl of (N,0) is -dN/dy, of (0,N) is dN/dx; div is (dN/dx, dN/dy)
          const double curl_k[2] = {-gx[k].y(), gx[k].x()};
          const double div_k[2] = {gx[k].x(), gx[k].y()};
          for (int l = 0; l < npt; ++l) {
            const double curl_l[2] = {-gx[l].y(), gx[l].x()};
            const double div_l[2] = {gx[l].x(), gx[l].y()};
            for (int ck = 0; ck < 2; ++ck) {
              for (int cl = 0; cl < 2; ++cl) {
                double v = 0;
                if (terms & term_curl_curl) v += kappa * curl_l[cl] * curl_k[ck];
                if (terms & term_div_penalty) v += w_div * div_l[cl] * div_k[ck];
                local(2 * k + ck, 2 * l + cl) += w * v;
              }
            }
          }
        }
      }

      // mixed blocks share one product so the sign-flipped matrix is
      // symmetric to the last bit when theta = 1
      if (terms & (term_grad_p | term_constraint)) {
        for (int k = 0; k < npt; ++k) {
          for (int j = 0; j < mpt; ++j) {
            for (int c = 0; c < 2; ++c) {
              const double v = w * eps * gm[j][c] * bx.n[q][k];   // (eps dM_j/dc, N_k e_c)
              if (terms & term_grad_p) local(2 * k + c, 2 * npt + j) += v;
              if (terms & term_constraint) local(2 * npt + j, 2 * k + c) += -v;
            }
          }
        }
      }

      if (terms & term_grad_grad) {
        for (int i = 0; i < mpt; ++i) {
          for (int j = 0; j < mpt; ++j) {
            local(2 * npt + i, 2 * npt + j) += w * w_gg * gm[i].dot(gm[j]);
          }
        }
      }
    }
    emit_local(local, dofs, trip);
  }

  // ---- interface and boundary terms ------------------------------------
  const EdgeRule erule = edge_rule(2 * (fe.ell - 1) + 2);
  for (const Edge& e : mesh.edges) {
    if (e.kind == EdgeKind::interior) continue;
    const EdgeGeometry eg = edge_geometry(mesh, e);
    const bool interface = e.kind == EdgeKind::interface;
    const double kappa0 = coeffs.kappa_of(eg.sub[0]);
    const double kappa_avg =
        interface ? 0.5 * (kappa0 + coeffs.kappa_of(eg.sub[1])) : kappa0;
    const double avg_factor = interface ? 0.5 : 1.0;
    const double h_edge = params.local_h ? eg.length : h_global;
    const double w_tan = params.gamma / h_edge * kappa_avg;
    const double w_nrm = ca * std::pow(h_edge, 2 * alpha - 1);

    std::array<TriGeometry, 2> geo;
    for (int s = 0; s < eg.sides; ++s) geo[s] = tri_geometry(mesh, eg.tri[s]);

    const int medge = eg.sides * 2 * npt;
    Eigen::MatrixXd elocal = Eigen::MatrixXd::Zero(medge, medge);
    std::vector<int> edofs(medge);
    std::vector<double> tangential(medge), curl_avg(medge), normal_eps(medge);
    for (int s = 0; s < eg.sides; ++s) {
      for (int k = 0; k < npt; ++k) {
        edofs[s * 2 * npt + 2 * k] = 2 * fe.xh_slot[eg.tri[s]][k];
        edofs[s * 2 * npt + 2 * k + 1] = 2 * fe.xh_slot[eg.tri[s]][k] + 1;
      }
    }

    for (size_t q = 0; q < erule.points.size(); ++q) {
      const Vec2 x = eg.pa + erule.points[q] * (eg.pb - eg.pa);
      const double w = erule.weights[q] * eg.length;
      for (int s = 0; s < eg.sides; ++s) {
        const Vec2 ns = s == 0 ? eg.normal : Vec2(-eg.normal);
        const double eps_s = coeffs.eps_of(eg.sub[s]);
        const double kappa_s = coeffs.kappa_of(eg.sub[s]);
        double nb[6];
        Vec2 dnb[6];
        eval_basis(fe.degree, geo[s].unmap(x), nb, dnb);
        for (int k = 0; k < npt; ++k) {
          const Vec2 g = geo[s].inv_jac_t * dnb[k];
          const int base = s * 2 * npt + 2 * k;
          // component 0: (N,0); component 1: (0,N); v x n = v1 n2 - v2 n1
          tangential[base] = nb[k] * ns.y();
          tangential[base + 1] = -nb[k] * ns.x();
          curl_avg[base] = avg_factor * kappa_s * -g.y();
          curl_avg[base + 1] = avg_factor * kappa_s * g.x();
          normal_eps[base] = eps_s * nb[k] * ns.x();
          normal_eps[base + 1] = eps_s * nb[k] * ns.y();
        }
      }
      for (int i = 0; i < medge; ++i) {
        for (int j = 0; j < medge; ++j) {
          double v = 0;
          if (terms & term_consistency) v += curl_avg[j] * tangential[i];
          if (terms & term_adjoint_consistency)
            v += params.theta * curl_avg[i] * tangential[j];
          if (terms & term_tangential_penalty) v += w_tan * tangential[j] * tangential[i];
          if (interface && (terms & term_normal_jump))
            v += w_nrm * normal_eps[j] * normal_eps[i];
          elocal(i, j) += w * v;
        }
      }
    }
    emit_local(elocal, edofs, trip);
  }

  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

Eigen::VectorXd assemble_rhs(const FeSystem& fe, const CoefficientField& coeffs,
                             const PenaltyParams& params, const VectorBySubdomain& g,
                             const BoundaryTrace& g_t) {
  validate_params(params);
  validate_coefficients(coeffs, fe.mesh.subdomain_count);

  const Mesh& mesh = fe.mesh;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(fe.total_dofs());
  const int npt = fe.nodes_per_tri();
  const int mpt = fe.mh_nodes_per_tri();
  const double h_global = mesh.h;

  if (g) {
    // Elevated rule: the load is generally non-polynomial.
    const TriangleRule cell = triangle_rule(2 * fe.ell + 6);
    BasisTable bx, bm;
    bx.build(fe.degree, cell.points);
    bm.build(fe.mh_degree, cell.points);
    std::vector<Vec2> gm(mpt);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const TriGeometry geo = tri_geometry(mesh, t);
      const int sub = mesh.triangles[t].subdomain;
      const double eps = coeffs.eps_of(sub);
      const double h_cell = params.local_h ? longest_edge_of(mesh, t) : h_global;
      const double w_g = params.c_alpha * std::pow(h_cell, 2 * (1 - params.alpha));
      for (size_t q = 0; q < cell.points.size(); ++q) {
        const double w = cell.weights[q] * geo.det;
        const Vec2 gv = g(geo.map(cell.points[q]), sub);
        for (int k = 0; k < mpt; ++k) gm[k] = geo.inv_jac_t * bm.dn[q][k];
        for (int k = 0; k < npt; ++k) {
          const int ek = 2 * fe.xh_slot[t][k];
          rhs[ek] += w * eps * gv.x() * bx.n[q][k];
          rhs[ek + 1] += w * eps * gv.y() * bx.n[q][k];
        }
        for (int j = 0; j < mpt; ++j) {
          const int pj = fe.mh_dof[t][j];
          if (pj >= 0) rhs[fe.n_xh + pj] += w * w_g * eps * gv.dot(gm[j]);
        }
      }
    }
  }

  if (g_t) {
    const EdgeRule erule = gauss_legendre(2 * fe.ell + 4);
    for (const Edge& e : mesh.edges) {
      if (e.kind != EdgeKind::boundary) continue;
      const EdgeGeometry eg = edge_geometry(mesh, e);
      const double kappa0 = coeffs.kappa_of(eg.sub[0]);
      const double h_edge = params.local_h ? eg.length : h_global;
      const TriGeometry geo = tri_geometry(mesh, eg.tri[0]);
      for (size_t q = 0; q < erule.points.size(); ++q) {
        const Vec2 x = eg.pa + erule.points[q] * (eg.pb - eg.pa);
        const double w = erule.weights[q] * eg.length;
        const double data = g_t(x, eg.normal);
        double nb[6];
        Vec2 dnb[6];
        eval_basis(fe.degree, geo.unmap(x), nb, dnb);
        for (int k = 0; k < npt; ++k) {
          const Vec2 gr = geo.inv_jac_t * dnb[k];
          const int base = 2 * fe.xh_slot[eg.tri[0]][k];
          const double tang[2] = {nb[k] * eg.normal.y(), -nb[k] * eg.normal.x()};
          const double curl[2] = {-gr.y(), gr.x()};
          for (int c = 0; c < 2; ++c) {
            rhs[base + c] += w * data *
                             (params.theta * kappa0 * curl[c] +
                              params.gamma / h_edge * kappa0 * tang[c]);
          }
        }
      }
    }
  }
  return rhs;
}

Pencil assemble_pencil(const FeSystem& fe, const CoefficientField& coeffs,
                       const PenaltyParams& params, bool allow_alpha_one) {
  validate_params(params);
  if (params.theta != 1.0)
    throw std::invalid_argument("pencil: the eigenproblem requires theta = 1");
  if (params.alpha >= 1.0 && !allow_alpha_one)
    throw std::invalid_argument(
        "pencil: alpha = 1 admits spectral pollution; pass the pollution-study flag to proceed");

  Pencil out;
  out.c = params.c_alpha * std::pow(fe.mesh.h, 2 * (1 - params.alpha));

  // Sign flip of the multiplier test block makes a_h symmetric.
  SparseMatrix a = assemble_ah(fe, coeffs, params);
  Triplets trip;
  trip.reserve(a.nonZeros());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const double s = it.row() >= fe.n_xh ? -1.0 : 1.0;
      trip.emplace_back(it.row(), it.col(), s * it.value());
    }
  }
  out.a.resize(a.rows(), a.cols());
  out.a.setFromTriplets(trip.begin(), trip.end());

  // B'((E,p),(F,q)) = (eps (E - c grad p), F - c grad q)
  const Mesh& mesh = fe.mesh;
  const int npt = fe.nodes_per_tri();
  const int mpt = fe.mh_nodes_per_tri();
  const int nloc = 2 * npt + mpt;
  const TriangleRule cell = triangle_rule(2 * (fe.ell - 1) + 2);
  BasisTable bx, bm;
  bx.build(fe.degree, cell.points);
  bm.build(fe.mh_degree, cell.points);
  Triplets btrip;
  btrip.reserve(static_cast<size_t>(mesh.num_triangles()) * nloc * nloc);
  Eigen::MatrixXd local(nloc, nloc);
  std::vector<int> dofs(nloc);
  std::vector<Vec2> gm(mpt);
  const double c = out.c;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry geo = tri_geometry(mesh, t);
    const double eps = coeffs.eps_of(mesh.triangles[t].subdomain);
    for (int k = 0; k < npt; ++k) {
      dofs[2 * k] = 2 * fe.xh_slot[t][k];
      dofs[2 * k + 1] = 2 * fe.xh_slot[t][k] + 1;
    }
    for (int j = 0; j < mpt; ++j) {
      const int pj = fe.mh_dof[t][j];
      dofs[2 * npt + j] = pj < 0 ? -1 : fe.n_xh + pj;
    }
    local.setZero();
    for (size_t q = 0; q < cell.points.size(); ++q) {
      const double w = cell.weights[q] * geo.det * eps;
      for (int k = 0; k < mpt; ++k) gm[k] = geo.inv_jac_t * bm.dn[q][k];
      for (int k = 0; k < npt; ++k) {
        for (int l = 0; l < npt; ++l) {
          const double v = w * bx.n[q][k] * bx.n[q][l];
          local(2 * k, 2 * l) += v;
          local(2 * k + 1, 2 * l + 1) += v;
        }
        for (int j = 0; j < mpt; ++j) {
          for (int cc = 0; cc < 2; ++cc) {
            const double v = -c * w * bx.n[q][k] * gm[j][cc];
            local(2 * k + cc, 2 * npt + j) += v;
            local(2 * npt + j, 2 * k + cc) += v;
          }
        }
      }
      for (int i = 0; i < mpt; ++i) {
        for (int j = 0; j < mpt; ++j) {
          local(2 * npt + i, 2 * npt + j) += c * c * w * gm[i].dot(gm[j]);
        }
      }
    }
    emit_local(local, dofs, btrip);
  }
  out.b.resize(fe.total_dofs(), fe.total_dofs());
  out.b.setFromTriplets(btrip.begin(), btrip.end());
  return out;
}

double discrete_norm_squared(const FeSystem& fe, const CoefficientField& coeffs,
                             const PenaltyParams& params, const DiscreteField& x) {
  validate_params(params);
  validate_coefficients(coeffs, fe.mesh.subdomain_count);
  const Mesh& mesh = fe.mesh;
  const double h_global = mesh.h;
  const double ca = params.c_alpha, alpha = params.alpha;
  double total = 0;

  const TriangleRule cell = triangle_rule(2 * (fe.ell - 1) + 2);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry geo = tri_geometry(mesh, t);
    const int sub = mesh.triangles[t].subdomain;
    const double eps = coeffs.eps_of(sub), kappa = coeffs.kappa_of(sub);
    const double h_cell = params.local_h ? longest_edge_of(mesh, t) : h_global;
    double cell_sum = 0;
    for (size_t q = 0; q < cell.points.size(); ++q) {
      const FieldValue f = eval_field(fe, x.e, t, cell.points[q]);
      const Vec2 gp = fe.n_mh > 0 ? eval_multiplier_gradient(fe, x.p, t, cell.points[q])
                                  : Vec2(Vec2::Zero());
      double v = kappa * f.curl * f.curl;
      v += ca * std::pow(h_cell, 2 * alpha) * eps * eps * f.div * f.div;
      v += ca * std::pow(h_cell, 2 * (1 - alpha)) * eps * gp.squaredNorm();
      cell_sum += cell.weights[q] * v;
    }
    total += cell_sum * geo.det;
  }

  const EdgeRule erule = edge_rule(2 * (fe.ell - 1) + 2);
  for (const Edge& e : mesh.edges) {
    if (e.kind == EdgeKind::interior) continue;
    const EdgeGeometry eg = edge_geometry(mesh, e);
    const bool interface = e.kind == EdgeKind::interface;
    const double kappa_avg = interface
                                 ? 0.5 * (coeffs.kappa_of(eg.sub[0]) + coeffs.kappa_of(eg.sub[1]))
                                 : coeffs.kappa_of(eg.sub[0]);
    const double h_edge = params.local_h ? eg.length : h_global;
    std::array<TriGeometry, 2> geo;
    for (int s = 0; s < eg.sides; ++s) geo[s] = tri_geometry(mesh, eg.tri[s]);
    double edge_sum = 0;
    for (size_t q = 0; q < erule.points.size(); ++q) {
      const Vec2 p = eg.pa + erule.points[q] * (eg.pb - eg.pa);
      double tjump = 0, njump = 0;
      for (int s = 0; s < eg.sides; ++s) {
        const Vec2 ns = s == 0 ? eg.normal : Vec2(-eg.normal);
        const FieldValue f = eval_field(fe, x.e, eg.tri[s], geo[s].unmap(p));
        tjump += f.value.x() * ns.y() - f.value.y() * ns.x();
        njump += coeffs.eps_of(eg.sub[s]) * f.value.dot(ns);
      }
      double v = params.gamma / h_edge * kappa_avg * tjump * tjump;
      if (interface) v += ca * std::pow(h_edge, 2 * alpha - 1) * njump * njump;
      edge_sum += erule.weights[q] * v;
    }
    total += edge_sum * eg.length;
  }
  return total;
}

double eps_inner_product(const FeSystem& fe, const CoefficientField& coeffs,
                         const DiscreteField& u, const DiscreteField& v, double c_u,
                         double c_v) {
  const Mesh& mesh = fe.mesh;
  const TriangleRule cell = triangle_rule(2 * (fe.ell - 1) + 2);
  double total = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry geo = tri_geometry(mesh, t);
    const double eps = coeffs.eps_of(mesh.triangles[t].subdomain);
    double s = 0;
    for (size_t q = 0; q < cell.points.size(); ++q) {
      Vec2 a = eval_field(fe, u.e, t, cell.points[q]).value;
      Vec2 b = eval_field(fe, v.e, t, cell.points[q]).value;
      if (c_u != 0 && fe.n_mh > 0)
        a -= c_u * eval_multiplier_gradient(fe, u.p, t, cell.points[q]);
      if (c_v != 0 && fe.n_mh > 0)
        b -= c_v * eval_multiplier_gradient(fe, v.p, t, cell.points[q]);
      s += cell.weights[q] * eps * a.dot(b);
    }
    total += s * geo.det;
  }
  return total;
}

void dump_matrix(const SparseMatrix& m, std::ostream& out) {
  char buf[96];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf;
    }
  }
}

}  // namespace maxip
