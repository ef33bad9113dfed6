// Command line driver: mesh generation, boundary value solves and sweeps,
// checkerboard eigenvalue runs and sweeps, with CSV or markdown output.

#include <CLI11.hpp>

#include "maxip/harness.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace maxip;

DomainKind parse_domain(const std::string& name) {
  if (name == "lshape") return DomainKind::lshape_three_subdomains;
  if (name == "checkerboard") return DomainKind::square_checkerboard;
  if (name == "square") return DomainKind::unit_square_single;
  throw CLI::ValidationError("--domain", "expected lshape, checkerboard or square");
}

MeshStyle parse_style(const std::string& name) {
  if (name == "structured") return MeshStyle::structured;
  if (name == "powell-sabin") return MeshStyle::powell_sabin;
  if (name == "hct") return MeshStyle::hct;
  throw CLI::ValidationError("--style", "expected structured, powell-sabin or hct");
}

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "md") return TableFormat::md;
  throw CLI::ValidationError("--format", "expected csv or md");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

std::string strf(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interior penalty solver for the 2D Maxwell transmission problem"};
  app.require_subcommand(1);
  // --h is a real option below, so keep only the long form of the help flag.
  const auto long_help = [](CLI::App* a) {
    a->set_help_flag("--help", "print this help message and exit");
  };
  long_help(&app);

  std::string domain_name = "lshape", style_name = "structured";
  std::string format_name = "csv", out_path, mesh_path, dump_path;
  double target_h = 0.1, lambda = 0.535, alpha = 1.0, gamma = 10.0, c_alpha = 1.0;
  double theta = 1.0, eps_r = 0.5, tol = 1e-8;
  int degree = 1, mh_degree = 0, num = 10, max_basis = 0;
  bool local_h = false, allow_alpha_one = false;
  std::vector<double> h_list, alpha_list;

  auto* mesh_cmd = app.add_subcommand("mesh", "mesh utilities");
  long_help(mesh_cmd);
  auto* gen = mesh_cmd->add_subcommand("gen", "generate a mesh file");
  long_help(gen);
  gen->add_option("--domain", domain_name, "lshape, checkerboard or square");
  gen->add_option("--h", target_h, "target mesh size")->required();
  gen->add_option("--style", style_name, "structured, powell-sabin or hct");
  gen->add_option("--out", out_path, "output mesh file")->required();

  auto* bvp = app.add_subcommand("bvp", "solve one boundary value problem");
  long_help(bvp);
  bvp->add_option("--domain", domain_name, "lshape or square");
  bvp->add_option("--lambda", lambda, "singularity exponent (lshape)");
  bvp->add_option("--alpha", alpha, "mesh-weight exponent");
  bvp->add_option("--gamma", gamma, "tangential jump penalty");
  bvp->add_option("--c-alpha", c_alpha, "stabilization constant");
  bvp->add_option("--theta", theta, "symmetry switch: -1, 0 or 1");
  bvp->add_option("--degree", degree, "polynomial degree of the field space (1 or 2)");
  bvp->add_option("--mh-degree", mh_degree, "multiplier degree (default: same as field)");
  bvp->add_option("--h", target_h, "target mesh size");
  bvp->add_option("--mesh", mesh_path, "mesh file instead of --h");
  bvp->add_option("--style", style_name, "structured, powell-sabin or hct");
  bvp->add_flag("--local-h", local_h, "use per-entity mesh sizes in the weights");
  bvp->add_option("--dump-matrix", dump_path, "write the assembled matrix (row col value)");
  bvp->add_option("--format", format_name, "csv or md");
  bvp->add_option("--out", out_path, "output file (default stdout)");

  auto* sweep = app.add_subcommand("bvp-sweep", "mesh refinement sweep with rates");
  long_help(sweep);
  sweep->add_option("--domain", domain_name, "lshape or square");
  sweep->add_option("--lambda", lambda, "singularity exponent (lshape)");
  sweep->add_option("--h-list", h_list, "mesh sizes, coarse to fine")->required()->delimiter(',');
  sweep->add_option("--alpha-list", alpha_list, "mesh-weight exponents")->required()->delimiter(',');
  sweep->add_option("--gamma", gamma, "tangential jump penalty");
  sweep->add_option("--c-alpha", c_alpha, "stabilization constant");
  sweep->add_option("--theta", theta, "symmetry switch: -1, 0 or 1");
  sweep->add_option("--degree", degree, "polynomial degree of the field space (1 or 2)");
  sweep->add_option("--mh-degree", mh_degree, "multiplier degree (default: same as field)");
  sweep->add_option("--style", style_name, "structured, powell-sabin or hct");
  sweep->add_option("--format", format_name, "csv or md");
  sweep->add_option("--out", out_path, "output file (default stdout)");

  auto* eig = app.add_subcommand("eig", "checkerboard eigenvalue run");
  long_help(eig);
  eig->add_option("--domain", domain_name, "checkerboard");
  eig->add_option("--eps-r", eps_r, "permittivity contrast");
  eig->add_option("--alpha", alpha, "mesh-weight exponent")->required();
  eig->add_option("--h", target_h, "target mesh size");
  eig->add_option("--num", num, "number of eigenvalues");
  eig->add_option("--tol", tol, "eigensolver residual tolerance");
  eig->add_option("--degree", degree, "polynomial degree of the field space (1 or 2)");
  eig->add_option("--gamma", gamma, "tangential jump penalty");
  eig->add_option("--c-alpha", c_alpha, "stabilization constant");
  eig->add_option("--style", style_name, "structured, powell-sabin or hct");
  eig->add_flag("--allow-alpha-one", allow_alpha_one,
                "permit alpha = 1 (spectral pollution study)");
  eig->add_option("--max-basis", max_basis, "Krylov basis cap (0 = solver default)");
  eig->add_option("--format", format_name, "csv or md");
  eig->add_option("--out", out_path, "output file (default stdout)");

  auto* eig_sweep = app.add_subcommand("eig-sweep", "eigenvalue refinement sweep");
  long_help(eig_sweep);
  eig_sweep->add_option("--eps-r", eps_r, "permittivity contrast");
  eig_sweep->add_option("--alpha", alpha, "mesh-weight exponent")->required();
  eig_sweep->add_option("--h-list", h_list, "mesh sizes, coarse to fine")->required()->delimiter(',');
  eig_sweep->add_option("--num", num, "number of eigenvalues");
  eig_sweep->add_option("--tol", tol, "eigensolver residual tolerance");
  eig_sweep->add_option("--degree", degree, "polynomial degree of the field space (1 or 2)");
  eig_sweep->add_option("--gamma", gamma, "tangential jump penalty");
  eig_sweep->add_option("--c-alpha", c_alpha, "stabilization constant");
  eig_sweep->add_option("--style", style_name, "structured, powell-sabin or hct");
  eig_sweep->add_flag("--allow-alpha-one", allow_alpha_one,
                      "permit alpha = 1 (spectral pollution study)");
  eig_sweep->add_option("--max-basis", max_basis, "Krylov basis cap (0 = solver default)");
  eig_sweep->add_option("--format", format_name, "csv or md");
  eig_sweep->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const Mesh m = make_mesh(DomainSpec{parse_domain(domain_name)}, target_h,
                               parse_style(style_name));
      write_mesh(m, out_path);
      std::cout << "wrote " << out_path << ": " << m.num_vertices() << " vertices, "
                << m.num_triangles() << " triangles, h = " << m.h << "\n";
      return 0;
    }

    if (bvp->parsed()) {
      const DomainKind kind = parse_domain(domain_name);
      Mesh mesh = mesh_path.empty()
                      ? make_mesh(DomainSpec{kind}, target_h, parse_style(style_name))
                      : read_mesh(mesh_path);
      const FeSystem fe = build_system(mesh, degree + 1, mh_degree);
      PenaltyParams params;
      params.alpha = alpha;
      params.gamma = gamma;
      params.c_alpha = c_alpha;
      params.theta = theta;
      params.local_h = local_h;

      CoefficientField coeffs;
      VectorBySubdomain exact, g;
      BoundaryTrace g_t;
      if (kind == DomainKind::lshape_three_subdomains) {
        coeffs = lshape_coefficients(eps_from_lambda(lambda));
        auto s = std::make_shared<SingularPotential>(SingularPotential{lambda});
        exact = [s](const Vec2& p, int sub) { return s->grad_from(p, sub); };
        g_t = [s](const Vec2& p, const Vec2& n) { return s->tangential_trace(p, n); };
      } else if (kind == DomainKind::unit_square_single) {
        coeffs = unit_coefficients(1);
        exact = [](const Vec2& p, int) { return manufactured_field(p); };
        g = [](const Vec2& p, int) { return manufactured_load(p); };
      } else {
        throw std::runtime_error("bvp: --domain must be lshape or square");
      }

      if (!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if (!dump) throw std::runtime_error("cannot open " + dump_path);
        dump_matrix(assemble_ah(fe, coeffs, params), dump);
      }

      BvpInfo info;
      const DiscreteField x = solve_bvp(fe, coeffs, params, g, g_t, &info);
      const ErrorValue err = l2_error(fe, x, exact);
      const TableFormat fmt = parse_format(format_name);
      std::string text;
      if (fmt == TableFormat::csv) {
        text += "# h=" + strf("%g", mesh.h) + " dofs=" + std::to_string(fe.total_dofs()) +
                " backward_error=" + strf("%.3e", info.backward_error) + "\n";
        text += "h,rel_err,coc\n";
        text += strf("%g", mesh.h) + "," + strf("%.6e", err.relative) + ",\n";
      } else {
        text += "| h | rel_err | coc |\n|---|---|---|\n| " + strf("%g", mesh.h) + " | " +
                strf("%.6e", err.relative) + " | -- |\n";
      }
      emit(text, out_path);
      return 0;
    }

    if (sweep->parsed()) {
      BvpSweepConfig config;
      config.domain = parse_domain(domain_name);
      config.lambda = lambda;
      config.h_list = h_list;
      config.alpha_list = alpha_list;
      config.degree = degree;
      config.style = parse_style(style_name);
      config.gamma = gamma;
      config.c_alpha = c_alpha;
      config.theta = theta;
      config.mh_degree = mh_degree;
      const BvpSweepResult result = run_bvp_sweep(config);
      emit(format_bvp_sweep(result, parse_format(format_name)), out_path);
      return 0;
    }

    if (eig->parsed()) {
      if (eig->count("--domain") > 0 && domain_name != "checkerboard")
        throw std::runtime_error("eig: only the checkerboard domain is supported");
      EigConfig config;
      config.eps_r = eps_r;
      config.alpha = alpha;
      config.target_h = target_h;
      config.num = num;
      config.tol = tol;
      config.degree = degree;
      config.style = parse_style(style_name);
      config.gamma = gamma;
      config.c_alpha = c_alpha;
      config.allow_alpha_one = allow_alpha_one;
      config.max_basis = max_basis;
      const EigRunResult result = run_eig(config);
      std::string text;
      if (parse_format(format_name) == TableFormat::csv)
        text += "# h=" + strf("%g", result.mesh_h) + " dofs=" + std::to_string(result.dofs) +
                " iterations=" + std::to_string(result.iterations) + "\n";
      text += format_eig_run(result, parse_format(format_name));
      emit(text, out_path);
      return 0;
    }

    if (eig_sweep->parsed()) {
      EigConfig config;
      config.eps_r = eps_r;
      config.alpha = alpha;
      config.num = num;
      config.tol = tol;
      config.degree = degree;
      config.style = parse_style(style_name);
      config.gamma = gamma;
      config.c_alpha = c_alpha;
      config.allow_alpha_one = allow_alpha_one;
      config.max_basis = max_basis;
      const EigSweepResult result = run_eig_sweep(config, h_list);
      emit(format_eig_sweep(result, parse_format(format_name)), out_path);
      return 0;
    }

    if (mesh_cmd->parsed()) {
      std::cerr << "mesh: expected the gen subcommand\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
