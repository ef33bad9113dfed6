#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <maxip/analytic.hpp>
#include <maxip/assembly.hpp>
#include <maxip/fe_space.hpp>
#include <maxip/geometry.hpp>
#include <maxip/harness.hpp>

#include "oracles.hpp"

#include <random>
#include <sstream>

using namespace maxip;

namespace {

FeSystem make_fe(DomainKind kind, double h, int ell, int mh_degree = 0,
                 MeshStyle style = MeshStyle::structured) {
  const DomainSpec dom{kind};
  return build_system(make_mesh(dom, h, style), ell, mh_degree);
}

CoefficientField coeffs_for(const FeSystem& fe, double eps_r) {
  if (fe.mesh.subdomain_count == 4) return checkerboard_coefficients(eps_r);
  if (fe.mesh.subdomain_count == 3) return lshape_coefficients(eps_r);
  return unit_coefficients(1);
}

double rel_matrix_gap(const Eigen::MatrixXd& want, const SparseMatrix& got) {
  const Eigen::MatrixXd g(got);
  const double scale = want.cwiseAbs().maxCoeff();
  return (want - g).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("parameter validation") {
  PenaltyParams p;
  CHECK_NOTHROW(validate_params(p));
  p.alpha = -0.1;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
  p.alpha = 1.1;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
  p = PenaltyParams{};
  p.gamma = 0.0;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
  p = PenaltyParams{};
  p.theta = 0.5;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
  p = PenaltyParams{};
  p.c_alpha = -1.0;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
}

TEST_CASE("assembled form matches the dense quadrature oracle") {
  struct Combo {
    DomainKind kind;
    double h;
    int ell, mh_degree;
    MeshStyle style;
    double eps_r, alpha, theta, gamma;
    bool local_h;
  };
  const Combo combos[] = {
      {DomainKind::unit_square_single, 1.0, 2, 0, MeshStyle::structured, 1.0, 0.7, 1.0,
       10.0, false},
      {DomainKind::square_checkerboard, 0.5, 2, 0, MeshStyle::structured, 0.5, 0.7, 1.0,
       10.0, false},
      {DomainKind::square_checkerboard, 0.5, 2, 0, MeshStyle::structured, 0.1, 0.4, -1.0,
       100.0, false},
      {DomainKind::square_checkerboard, 0.5, 2, 0, MeshStyle::structured, 0.5, 1.0, 0.0,
       10.0, true},
      {DomainKind::lshape_three_subdomains, 0.5, 2, 0, MeshStyle::structured, 0.4989, 0.9,
       1.0, 10.0, false},
      {DomainKind::lshape_three_subdomains, 1.0, 3, 0, MeshStyle::structured, 0.5, 0.8,
       1.0, 10.0, false},
      {DomainKind::lshape_three_subdomains, 1.0, 3, 1, MeshStyle::structured, 0.5, 0.6,
       -1.0, 10.0, true},
      {DomainKind::square_checkerboard, 1.0, 2, 0, MeshStyle::powell_sabin, 0.5, 0.7, 1.0,
       10.0, false},
  };
  for (const Combo& c : combos) {
    CAPTURE(static_cast<int>(c.kind));
    CAPTURE(c.ell);
    CAPTURE(c.alpha);
    CAPTURE(c.theta);
    const FeSystem fe = make_fe(c.kind, c.h, c.ell, c.mh_degree, c.style);
    const CoefficientField co = coeffs_for(fe, c.eps_r);
    PenaltyParams params;
    params.alpha = c.alpha;
    params.theta = c.theta;
    params.gamma = c.gamma;
    params.local_h = c.local_h;
    const SparseMatrix a = assemble_ah(fe, co, params);
    const Eigen::MatrixXd want = oracle::dense_ah(fe, co, params);
    CHECK(rel_matrix_gap(want, a) < 1e-12);
  }
}

TEST_CASE("single-term assemblies add up to the full form") {
  const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.5, 2);
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  const SparseMatrix full = assemble_ah(fe, co, params);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(fe.total_dofs(), fe.total_dofs());
  int term_count = 0;
  for (std::uint32_t bit = 1; bit <= term_normal_jump; bit <<= 1) {
    sum += Eigen::MatrixXd(assemble_ah(fe, co, params, bit));
    ++term_count;
  }
  CHECK(term_count == 9);
  const double scale = Eigen::MatrixXd(full).cwiseAbs().maxCoeff();
  CHECK((sum - Eigen::MatrixXd(full)).cwiseAbs().maxCoeff() / scale < 1e-12);
}

TEST_CASE("assembly is deterministic") {
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  std::string first;
  for (int round = 0; round < 2; ++round) {
    const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.25, 2);
    std::ostringstream out;
    dump_matrix(assemble_ah(fe, co, params), out);
    if (round == 0)
      first = out.str();
    else
      CHECK(out.str() == first);
  }
  CHECK_FALSE(first.empty());
}

TEST_CASE("couplings stay within shared cells and edges") {
  const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.5, 2);
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  const SparseMatrix a = assemble_ah(fe, co, params);

  // Allowed pairs: dofs of the same triangle, or dofs of the two triangles
  // adjacent to an interface/boundary edge (the traces involve every basis
  // function of both cells).
  std::set<std::pair<int, int>> allowed;
  const auto add_tri_dofs = [&](int t, std::vector<int>& dofs) {
    for (int k = 0; k < fe.nodes_per_tri(); ++k) {
      dofs.push_back(2 * fe.xh_slot[t][k]);
      dofs.push_back(2 * fe.xh_slot[t][k] + 1);
    }
    for (int k = 0; k < fe.mh_nodes_per_tri(); ++k)
      if (fe.mh_dof[t][k] >= 0) dofs.push_back(fe.n_xh + fe.mh_dof[t][k]);
  };
  const auto allow_all = [&](const std::vector<int>& dofs) {
    for (int i : dofs)
      for (int j : dofs) allowed.insert({i, j});
  };
  for (int t = 0; t < fe.mesh.num_triangles(); ++t) {
    std::vector<int> dofs;
    add_tri_dofs(t, dofs);
    allow_all(dofs);
  }
  for (const Edge& e : fe.mesh.edges) {
    if (e.kind == EdgeKind::interior) continue;
    std::vector<int> dofs;
    add_tri_dofs(e.tri[0], dofs);
    if (e.tri[1] >= 0) add_tri_dofs(e.tri[1], dofs);
    allow_all(dofs);
  }
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.value() == 0.0) continue;
      CHECK(allowed.count({static_cast<int>(it.row()), static_cast<int>(it.col())}) == 1);
    }
  }
}

TEST_CASE("theta=-1 makes the form equal to the discrete norm") {
  const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.5, 2);
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  params.theta = -1.0;
  const SparseMatrix a = assemble_ah(fe, co, params);
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    const Eigen::VectorXd v = random_vector(fe.total_dofs(), seed);
    const DiscreteField x{v.head(fe.n_xh), v.tail(fe.n_mh)};
    const double form = v.dot(a * v);
    const double norm2 = discrete_norm_squared(fe, co, params, x);
    CHECK(form == doctest::Approx(norm2).epsilon(1e-12));
  }
}

TEST_CASE("discrete norm of simple fields") {
  const FeSystem fe = make_fe(DomainKind::unit_square_single, 1.0, 2);
  const CoefficientField co = unit_coefficients(1);
  PenaltyParams params;
  params.alpha = 0.7;
  // Constant field (1,0): no curl, no divergence, no multiplier; only the
  // tangential jump on the two horizontal boundary edges contributes
  // gamma/h * |v x n|^2 * length = gamma/h each.
  const DiscreteField ones = interpolate(fe, [](const Vec2&, int) { return Vec2(1, 0); });
  CHECK(discrete_norm_squared(fe, co, params, ones) ==
        doctest::Approx(2.0 * params.gamma / fe.mesh.h).epsilon(1e-12));
  CHECK(discrete_norm_squared(fe, co, params, zero_field(fe)) == 0.0);
}

TEST_CASE("right-hand side matches the dense oracle") {
  // Polynomial volume load on the unit square: both quadratures are exact,
  // so assembly must agree to roundoff.
  {
    const FeSystem fe = make_fe(DomainKind::unit_square_single, 0.5, 2);
    const CoefficientField co = unit_coefficients(1);
    PenaltyParams params;
    params.alpha = 0.3;
    const VectorBySubdomain g = [](const Vec2& p, int) {
      return Vec2{p.x() * p.x() * p.y() + 2.0 * p.y(),
                  p.x() * p.x() * p.x() - p.x() * p.y()};
    };
    const Eigen::VectorXd got = assemble_rhs(fe, co, params, g, nullptr);
    const Eigen::VectorXd want = oracle::dense_rhs(fe, co, params, g, nullptr);
    CHECK((want - got).lpNorm<Eigen::Infinity>() /
              want.lpNorm<Eigen::Infinity>() <
          1e-12);
    // A transcendental load is only integrated approximately; the production
    // rule and the higher-order reference rule agree to quadrature accuracy.
    const VectorBySubdomain gt = [](const Vec2& p, int) { return manufactured_load(p); };
    const Eigen::VectorXd got_t = assemble_rhs(fe, co, params, gt, nullptr);
    const Eigen::VectorXd want_t = oracle::dense_rhs(fe, co, params, gt, nullptr);
    CHECK((want_t - got_t).lpNorm<Eigen::Infinity>() /
              want_t.lpNorm<Eigen::Infinity>() <
          1e-5);
  }
  // Tangential boundary data on the L-shape, degrees 1 and 2.
  for (int ell : {2, 3}) {
    const FeSystem fe = make_fe(DomainKind::lshape_three_subdomains, 0.5, ell);
    const double lambda = 0.535;
    const CoefficientField co = lshape_coefficients(eps_from_lambda(lambda));
    PenaltyParams params;
    params.alpha = 0.9;
    const auto s = std::make_shared<SingularPotential>(SingularPotential{lambda});
    const BoundaryTrace g_t = [s](const Vec2& p, const Vec2& n) {
      return s->tangential_trace(p, n);
    };
    const Eigen::VectorXd got = assemble_rhs(fe, co, params, nullptr, g_t);
    const Eigen::VectorXd want = oracle::dense_rhs(fe, co, params, nullptr, g_t);
    CHECK((want - got).lpNorm<Eigen::Infinity>() /
              want.lpNorm<Eigen::Infinity>() <
          1e-12);
  }
  // No data, no load.
  {
    const FeSystem fe = make_fe(DomainKind::lshape_three_subdomains, 0.5, 2);
    const CoefficientField co = lshape_coefficients(0.5);
    PenaltyParams params;
    const Eigen::VectorXd r = assemble_rhs(fe, co, params, nullptr, nullptr);
    CHECK(r.norm() == 0.0);
  }
}

TEST_CASE("pencil: structure, symmetry and quadratic form") {
  const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.5, 2);
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  params.theta = 1.0;
  const Pencil p = assemble_pencil(fe, co, params);
  CHECK(p.c ==
        doctest::Approx(params.c_alpha * std::pow(fe.mesh.h, 2 * (1 - params.alpha)))
            .epsilon(1e-14));

  // A' is the sign-flipped a_h matrix and symmetric at theta = 1.
  const Eigen::MatrixXd a_flip =
      oracle::flip_p_rows(Eigen::MatrixXd(assemble_ah(fe, co, params)), fe.n_xh);
  CHECK(rel_matrix_gap(a_flip, p.a) < 1e-14);
  const Eigen::MatrixXd ad(p.a);
  CHECK((ad - ad.transpose()).cwiseAbs().maxCoeff() <=
        1e-12 * ad.cwiseAbs().maxCoeff());

  // B' matches the dense oracle and its own quadratic-form identity.
  const Eigen::MatrixXd bw = oracle::dense_pencil_b(fe, co, p.c);
  CHECK(rel_matrix_gap(bw, p.b) < 1e-12);
  for (unsigned seed : {11u, 12u, 13u}) {
    const Eigen::VectorXd v = random_vector(fe.total_dofs(), seed);
    const DiscreteField x{v.head(fe.n_xh), v.tail(fe.n_mh)};
    const double quad = v.dot(p.b * v);
    const double want = eps_inner_product(fe, co, x, x, p.c, p.c);
    CHECK(quad == doctest::Approx(want).epsilon(1e-12));
    CHECK(quad >= -1e-12 * std::abs(want));  // positive semidefinite
  }

  // The E-block of B' is the plain eps mass matrix (c-independent).
  const Eigen::MatrixXd mass = oracle::dense_pencil_b(fe, co, 0.0);
  CHECK((Eigen::MatrixXd(p.b).topLeftCorner(fe.n_xh, fe.n_xh) -
         mass.topLeftCorner(fe.n_xh, fe.n_xh))
            .cwiseAbs()
            .maxCoeff() < 1e-12 * mass.cwiseAbs().maxCoeff());
}

TEST_CASE("pure multiplier vectors satisfy the closed-form eigenrelation") {
  // ( 0, p ) obeys A' (0,p) = -(1/c) B' (0,p) exactly; this family is removed
  // by deflation in the eigensolver.
  const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.5, 2);
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  params.theta = 1.0;
  const Pencil p = assemble_pencil(fe, co, params);
  for (unsigned seed : {21u, 22u}) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(fe.total_dofs());
    v.tail(fe.n_mh) = random_vector(fe.n_mh, seed);
    const Eigen::VectorXd lhs = p.a * v;
    const Eigen::VectorXd rhs = (-1.0 / p.c) * (p.b * v);
    CHECK((lhs - rhs).norm() <= 1e-12 * lhs.norm());
  }
}

TEST_CASE("pencil rejects unsupported parameters") {
  const FeSystem fe = make_fe(DomainKind::square_checkerboard, 0.5, 2);
  const CoefficientField co = checkerboard_coefficients(0.5);
  PenaltyParams params;
  params.alpha = 0.7;
  params.theta = 0.0;
  CHECK_THROWS_AS(assemble_pencil(fe, co, params), std::invalid_argument);
  params.theta = -1.0;
  CHECK_THROWS_AS(assemble_pencil(fe, co, params), std::invalid_argument);
  params.theta = 1.0;
  params.alpha = 1.0;
  CHECK_THROWS_AS(assemble_pencil(fe, co, params), std::invalid_argument);
  CHECK_NOTHROW(assemble_pencil(fe, co, params, /*allow_alpha_one=*/true));
}

TEST_CASE("matrix dump format") {
  SparseMatrix m(2, 2);
  m.insert(0, 0) = 1.5;
  m.insert(1, 0) = -2.0;
  m.makeCompressed();
  std::ostringstream out;
  dump_matrix(m, out);
  CHECK(out.str() == "0 0 1.5\n1 0 -2\n");
}
