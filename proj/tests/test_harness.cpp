#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <maxip/harness.hpp>

#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <string>

using namespace maxip;

TEST_CASE("observed rates recover exact power laws") {
  const std::vector<double> h{0.4, 0.2, 0.1};
  {
    std::vector<double> err;
    for (double x : h) err.push_back(3.7 * x * x);
    const std::vector<double> r = observed_rates(h, err);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
  {
    const std::vector<double> r = observed_rates(h, {0.3, 0.3, 0.3});
    CHECK(r[0] == doctest::Approx(0.0).scale(1).epsilon(1e-15));
  }
  {
    const std::vector<double> r = observed_rates({0.2, 0.1}, {0.6, 0.3});
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Two error values taken from an L-shape refinement pair.
  const std::vector<double> r = observed_rates({0.05, 0.025}, {6.186e-2, 4.289e-2});
  CHECK(r[0] == doctest::Approx(0.5283655174537084).epsilon(1e-13));

  CHECK(observed_rates({0.5}, {1.0}).empty());
  CHECK_THROWS_AS(observed_rates({0.5, 0.25}, {1.0}), std::invalid_argument);
}

TEST_CASE("a-priori rates and the optimal weight") {
  {
    const TheoryRates t = predicted_rates(0.535, 2, 1.0, /*divergence_free=*/true);
    CHECK(t.r2 == doctest::Approx(0.2675).epsilon(1e-15));
    CHECK(t.r == doctest::Approx(0.2675).epsilon(1e-15));
    CHECK(t.r1 == doctest::Approx(0.0).scale(1).epsilon(1e-15));
    CHECK(t.l2_rate == doctest::Approx(0.2675).epsilon(1e-15));
    CHECK(t.alpha_opt == doctest::Approx(0.8455988455988456).epsilon(1e-15));
    CHECK(t.l2_rate_opt == doctest::Approx(0.30880230880230886).epsilon(1e-15));
  }
  {
    const TheoryRates t = predicted_rates(0.535, 2, 0.9, /*divergence_free=*/false);
    CHECK(t.r2 == doctest::Approx(0.19425).epsilon(1e-14));
    CHECK(t.r1 == doctest::Approx(0.1).epsilon(1e-14));   // capped by 1 - alpha
    CHECK(t.r == doctest::Approx(0.1).epsilon(1e-14));    // general data: same cap
    CHECK(t.l2_rate == doctest::Approx(0.29425).epsilon(1e-14));
    const TheoryRates d = predicted_rates(0.535, 2, 0.9, /*divergence_free=*/true);
    CHECK(d.r == doctest::Approx(0.19425).epsilon(1e-14));  // cap lifted
  }
  {
    // tau = 1 admits every alpha in (0, 1].
    const TheoryRates t = predicted_rates(1.0, 2, 0.1, false);
    CHECK(t.r2 == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(t.r1 == doctest::Approx(0.05).epsilon(1e-13));
  }
  CHECK_THROWS_AS(predicted_rates(0.0, 2, 0.9, false), std::invalid_argument);
  CHECK_THROWS_AS(predicted_rates(1.5, 2, 0.9, false), std::invalid_argument);
  CHECK_THROWS_AS(predicted_rates(0.535, 1, 0.9, false), std::invalid_argument);
  // alpha below ell (1 - tau) / (ell - tau) = 0.6348... is inadmissible.
  CHECK_THROWS_AS(predicted_rates(0.535, 2, 0.5, false), std::invalid_argument);
  CHECK_THROWS_AS(predicted_rates(0.535, 2, 1.1, false), std::invalid_argument);
  CHECK_NOTHROW(predicted_rates(0.535, 2, 1.0, false));
}

TEST_CASE("layered origin quadrature handles the singular weight") {
  const Vec2 a(1.0, 0.0), b(0.0, 1.0);
  auto f = [](const Vec2& p) { return std::pow(p.squaredNorm(), -0.465); };
  const double truth = 1.1466621313761292;  // adaptive high-order reference

  const double v20 = integrate_origin_triangle(f, a, b, 20);
  CHECK(v20 == doctest::Approx(1.1466621027977171).epsilon(1e-12));
  CHECK(std::abs(v20 - truth) / truth < 5e-8);

  // Geometric error decay in the layer count.
  double prev = std::numeric_limits<double>::infinity();
  for (int levels : {2, 4, 6, 8}) {
    const double err = std::abs(integrate_origin_triangle(f, a, b, levels) - truth);
    CHECK(err < prev / 3.0);
    prev = err;
  }

  // Exact on polynomials, including the innermost core triangle.
  auto one = [](const Vec2&) { return 1.0; };
  CHECK(integrate_origin_triangle(one, a, b, 3) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(integrate_origin_triangle(one, a, b, 0), std::invalid_argument);
}

TEST_CASE("field error measurement") {
  const DomainSpec dom{DomainKind::lshape_three_subdomains};
  const FeSystem fe = build_system(make_mesh(dom, 0.5, MeshStyle::structured), 2);

  SUBCASE("zero field against the singular solution gives its norm") {
    const auto s = std::make_shared<SingularPotential>(SingularPotential{0.535});
    const ErrorValue e = l2_error(fe, zero_field(fe), [s](const Vec2& p, int sub) {
      return s->grad_from(p, sub);
    });
    CHECK_FALSE(e.exact_norm_zero);
    CHECK(e.absolute == doctest::Approx(1.1258935689833427).epsilon(1e-7));
    CHECK(e.relative == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("vanishing exact norm") {
    const VectorBySubdomain zero = [](const Vec2&, int) { return Vec2{0.0, 0.0}; };
    const ErrorValue both = l2_error(fe, zero_field(fe), zero);
    CHECK(both.exact_norm_zero);
    CHECK(both.relative == 0.0);
    const DiscreteField x =
        interpolate(fe, [](const Vec2&, int) { return Vec2{1.0, 0.0}; });
    const ErrorValue inf = l2_error(fe, x, zero);
    CHECK(inf.exact_norm_zero);
    CHECK(std::isinf(inf.relative));
  }

  SUBCASE("interpolants of representable fields carry no error") {
    const DomainSpec cb{DomainKind::square_checkerboard};
    const FeSystem cfe = build_system(make_mesh(cb, 0.5, MeshStyle::structured), 2);
    const VectorBySubdomain f = [](const Vec2& p, int) {
      return Vec2{2.0 * p.x() - p.y() + 1.0, p.x() + 3.0 * p.y() - 2.0};
    };
    const ErrorValue e = l2_error(cfe, interpolate(cfe, f), f);
    CHECK(e.relative <= 1e-12);
  }
}

TEST_CASE("reference eigenvalue registry") {
  const auto half = checkerboard_references(0.5);
  REQUIRE(half.has_value());
  REQUIRE(half->size() == 10);
  CHECK((*half)[0] == 3.3175);
  CHECK((*half)[2] == 6.1863);
  CHECK((*half)[9] == 30.5379);

  const auto tenth = checkerboard_references(0.1);
  REQUIRE(tenth.has_value());
  REQUIRE(tenth->size() == 4);
  CHECK((*tenth)[0] == 4.5339);
  CHECK((*tenth)[3] == 22.342);

  CHECK_FALSE(checkerboard_references(0.3).has_value());

  // The shipped JSON mirrors the registry.
  const std::string path = std::string(MAXIP_DATA_DIR) + "/checkerboard_eigenvalues.json";
  const auto from_file = load_references(path, 0.5);
  REQUIRE(from_file.has_value());
  CHECK(*from_file == *half);
  const auto from_file_tenth = load_references(path, 0.1);
  REQUIRE(from_file_tenth.has_value());
  CHECK(*from_file_tenth == *tenth);
  CHECK_FALSE(load_references(path, 0.25).has_value());
  CHECK_FALSE(load_references("/nonexistent/refs.json", 0.5).has_value());
}

TEST_CASE("spurious flagging uses a relative window") {
  const std::vector<double> refs{3.3175, 6.1863, 15.0830};
  const std::vector<bool> clean = flag_spurious(refs, refs);
  CHECK(clean == std::vector<bool>{false, false, false});

  // 1% deviation is inside the default 2% window, 3% is outside.
  const std::vector<bool> mixed =
      flag_spurious({3.3175 * 1.01, 6.1863 * 1.03, 7.8}, refs);
  CHECK(mixed == std::vector<bool>{false, true, true});

  CHECK(flag_spurious({}, refs).empty());
  CHECK(flag_spurious({3.3175 * 1.03}, refs, 0.05) == std::vector<bool>{false});
}

TEST_CASE("mesh construction styles") {
  const DomainSpec square{DomainKind::unit_square_single};
  CHECK(make_mesh(square, 1.0, MeshStyle::structured).num_triangles() == 2);
  CHECK(make_mesh(square, 1.0, MeshStyle::structured).num_vertices() == 4);
  CHECK(make_mesh(square, 1.0, MeshStyle::powell_sabin).num_triangles() == 12);
  CHECK(make_mesh(square, 1.0, MeshStyle::powell_sabin).num_vertices() == 11);
  CHECK(make_mesh(square, 1.0, MeshStyle::hct).num_triangles() == 6);
  CHECK(make_mesh(square, 1.0, MeshStyle::hct).num_vertices() == 6);

  const DomainSpec cb{DomainKind::square_checkerboard};
  const Mesh m = make_mesh(cb, 0.5, MeshStyle::structured);
  CHECK(m.num_vertices() == 25);
  CHECK(m.num_triangles() == 32);
  CHECK(make_mesh(cb, 0.5, MeshStyle::powell_sabin).num_triangles() == 192);
  CHECK(make_mesh(cb, 0.5, MeshStyle::hct).num_triangles() == 96);

  const DomainSpec lshape{DomainKind::lshape_three_subdomains};
  CHECK(make_mesh(lshape, 0.5, MeshStyle::structured).num_vertices() == 21);
  CHECK(make_mesh(lshape, 0.5, MeshStyle::structured).num_triangles() == 24);
}

TEST_CASE("boundary value sweep driver") {
  BvpSweepConfig config;
  config.domain = DomainKind::unit_square_single;
  config.h_list = {0.25, 0.125};
  config.alpha_list = {0.3};
  config.degree = 1;
  const BvpSweepResult r = run_bvp_sweep(config);
  REQUIRE(r.rows.size() == 1);
  REQUIRE(r.rows[0].size() == 2);
  CHECK_FALSE(r.rows[0][0].coc.has_value());
  REQUIRE(r.rows[0][1].coc.has_value());
  // The smooth benchmark converges at second order in L2.
  CHECK(*r.rows[0][1].coc > 1.5);
  CHECK(r.rows[0][1].rel_err < r.rows[0][0].rel_err);
  for (const SweepRow& row : r.rows[0]) {
    CHECK(row.backward_error <= 1e-9);
    CHECK(row.dofs > 0);
    CHECK(row.mesh_h > 0);
  }

  BvpSweepConfig bad = config;
  bad.h_list.clear();
  CHECK_THROWS_AS(run_bvp_sweep(bad), std::invalid_argument);
  bad = config;
  bad.domain = DomainKind::square_checkerboard;
  CHECK_THROWS_AS(run_bvp_sweep(bad), std::invalid_argument);
}

TEST_CASE("eigenvalue sweep driver") {
  EigConfig config;
  config.eps_r = 0.5;
  config.alpha = 0.7;
  config.num = 2;
  const EigSweepResult r = run_eig_sweep(config, {0.5, 0.25});
  REQUIRE(r.runs.size() == 2);
  REQUIRE(r.rates.size() == 1);
  REQUIRE(r.rates[0].size() == 2);
  for (const EigRunResult& run : r.runs) {
    REQUIRE(run.rows.size() == 2);
    CHECK(run.rows[0].index == 1);
    CHECK(run.rows[0].lambda > 0);
    CHECK(run.rows[0].lambda <= run.rows[1].lambda);
    REQUIRE(run.rows[0].reference.has_value());
  }
  // Errors against the references shrink under refinement.
  const auto refs = checkerboard_references(0.5);
  const double e1 = std::abs(r.runs[0].rows[0].lambda - (*refs)[0]);
  const double e2 = std::abs(r.runs[1].rows[0].lambda - (*refs)[0]);
  CHECK(e2 < e1);

  CHECK_THROWS_AS(run_eig_sweep(config, {}), std::invalid_argument);

  const std::string csv = format_eig_sweep(r, TableFormat::csv);
  CHECK(csv.find("# h=0.5\n") != std::string::npos);
  CHECK(csv.find("# rates\n") != std::string::npos);
  CHECK(csv == format_eig_sweep(r, TableFormat::csv));  // deterministic emission
}

TEST_CASE("table emission golden strings") {
  BvpSweepResult r;
  r.config.alpha_list = {0.9};
  SweepRow row1;
  row1.h = 0.1;
  row1.rel_err = 6.186e-2;
  SweepRow row2;
  row2.h = 0.05;
  row2.rel_err = 4.289e-2;
  row2.coc = 0.5283655174537084;
  r.rows = {{row1, row2}};

  CHECK(format_bvp_sweep(r, TableFormat::csv) ==
        "# alpha=0.9\n"
        "h,rel_err,coc\n"
        "0.1,6.186000e-02,\n"
        "0.05,4.289000e-02,0.5284\n");
  CHECK(format_bvp_sweep(r, TableFormat::md) ==
        "### alpha = 0.9\n\n"
        "| h | rel_err | coc |\n"
        "|---|---|---|\n"
        "| 0.1 | 6.186000e-02 | -- |\n"
        "| 0.05 | 4.289000e-02 | 0.5284 |\n\n");

  EigRunResult e;
  EigRow er1;
  er1.index = 1;
  er1.lambda = 3.317912;
  er1.reference = 3.3175;
  er1.rel_err = 1.242e-4;
  EigRow er2;
  er2.index = 2;
  er2.lambda = 7.82;
  er2.spurious = true;
  e.rows = {er1, er2};

  CHECK(format_eig_run(e, TableFormat::csv) ==
        "index,lambda,ref,rel_err,flag\n"
        "1,3.317912,3.3175,1.242e-04,ok\n"
        "2,7.820000,,,spurious\n");
  CHECK(format_eig_run(e, TableFormat::md) ==
        "| index | lambda | ref | rel_err | flag |\n"
        "|---|---|---|---|---|\n"
        "| 1 | 3.317912 | 3.3175 | 1.242e-04 | ok |\n"
        "| 2 | 7.820000 | -- | -- | spurious |\n");
}
