#pragma once

// Benchmark drivers: error measurement against the closed-form solutions,
// observed and predicted convergence rates, the checkerboard eigenvalue
// reference registry, and table emission (CSV and markdown).

#include "maxip/analytic.hpp"
#include "maxip/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace maxip {

// ---- convergence rates ------------------------------------------------

// ln(e1/e2) / ln(h1/h2) for consecutive rows.
std::vector<double> observed_rates(const std::vector<double>& h,
                                   const std::vector<double>& err);

// Rates from the a-priori theory for regularity exponent tau in (0,1],
// space exponent ell >= 2 and weight alpha:
//   r2 = alpha - 1 + tau (1 - alpha/ell),   r1 = min(1-alpha, r2),
//   discrete-norm rate r = r2 for divergence-free data, else min(1-alpha, r2),
//   L2 rate r1 + r2.
// alpha must lie in (ell(1-tau)/(ell-tau), 1].  Also carries the optimal
// alpha = ell(2-tau)/(2 ell - tau) with L2 rate tau(ell-1)/(ell - tau/2).
struct TheoryRates {
  double tau = 0, alpha = 0;
  int ell = 2;
  bool divergence_free = false;
  double r1 = 0, r2 = 0, r = 0, l2_rate = 0;
  double alpha_opt = 0, l2_rate_opt = 0;
};
TheoryRates predicted_rates(double tau, int ell, double alpha, bool divergence_free);

// ---- error measurement -------------------------------------------------

struct ErrorOptions {
  int rule_order = 8;        // conical rule size for error integrands
  // Self-similar subdivision depth at the origin.  The layered-rule error on
  // |grad S|^2 decays geometrically with the depth; 20 levels put the
  // relative quadrature error near 1e-8 while keeping every evaluation point
  // well clear of the origin cutoff of the analytic solution.
  int origin_levels = 20;
};

struct ErrorValue {
  double absolute = 0.0;
  double relative = 0.0;     // +inf when the exact norm vanishes but the error does not
  bool exact_norm_zero = false;
};

// L2 norm of E_h - E over the mesh.  Triangles with a vertex at the origin
// are integrated with layered self-similar subdivision so the r^{2 lambda - 2}
// singularity of the exact gradient is resolved.
ErrorValue l2_error(const FeSystem& fe, const DiscreteField& x, const VectorBySubdomain& exact,
                    const ErrorOptions& opts = {});

// Integrates f over the triangle (origin, a, b) with `levels` geometric
// layers toward the origin and the given rule on every child.
double integrate_origin_triangle(const std::function<double(const Vec2&)>& f, const Vec2& a,
                                 const Vec2& b, int levels, int rule_order = 8);

// Relative discrete-norm error for the smooth unit-square benchmark (single
// subdomain, exact multiplier zero, exact field divergence-free).
double manufactured_norm_error(const FeSystem& fe, const CoefficientField& coeffs,
                               const PenaltyParams& params, const DiscreteField& x,
                               const ErrorOptions& opts = {});

// ---- reference eigenvalues ----------------------------------------------

// First checkerboard Maxwell eigenvalues for eps contrast 0.5 and 0.1.
// Values at the precision of the published tables; shipped as
// data/checkerboard_eigenvalues.json and mirrored here.
std::optional<std::vector<double>> checkerboard_references(double eps_r);
std::optional<std::vector<double>> load_references(const std::string& json_path,
                                                   double eps_r);

// "spurious" when a computed value is not within rel_window of any reference.
std::vector<bool> flag_spurious(const std::vector<double>& computed,
                                const std::vector<double>& references,
                                double rel_window = 0.02);

// ---- sweep drivers --------------------------------------------------------

enum class MeshStyle { structured, powell_sabin, hct };
Mesh make_mesh(const DomainSpec& domain, double target_h, MeshStyle style);

struct BvpSweepConfig {
  DomainKind domain = DomainKind::lshape_three_subdomains;
  double lambda = 0.535;           // L-shape singularity exponent
  std::vector<double> h_list;
  std::vector<double> alpha_list;
  int degree = 1;                  // = ell - 1
  MeshStyle style = MeshStyle::structured;
  double gamma = 10.0, c_alpha = 1.0, theta = 1.0;
  int mh_degree = 0;               // 0: same as X_h
  ErrorOptions error_options{};
};

struct SweepRow {
  double h = 0;                    // requested mesh size
  double mesh_h = 0;               // realized mesh size
  int dofs = 0;
  double rel_err = 0;
  std::optional<double> coc;
  double backward_error = 0;
};

struct BvpSweepResult {
  BvpSweepConfig config;
  // rows[i][j]: alpha_list[i], h_list[j]
  std::vector<std::vector<SweepRow>> rows;
};
BvpSweepResult run_bvp_sweep(const BvpSweepConfig& config);

struct EigConfig {
  double eps_r = 0.5;
  double alpha = 0.7;
  double target_h = 0.1;
  int num = 10;
  double tol = 1e-8;
  int degree = 1;
  MeshStyle style = MeshStyle::structured;
  double gamma = 10.0, c_alpha = 1.0;
  bool allow_alpha_one = false;
  int max_basis = 0;  // Krylov basis cap; 0 keeps the solver default
};

struct EigRow {
  int index = 0;                   // 1-based
  double lambda = 0;
  std::optional<double> reference;
  std::optional<double> rel_err;
  bool spurious = false;
  double residual = 0;
};

struct EigRunResult {
  EigConfig config;
  double mesh_h = 0;
  int dofs = 0;
  int iterations = 0;
  std::vector<EigRow> rows;
};
EigRunResult run_eig(const EigConfig& config);

struct EigSweepResult {
  EigConfig config;
  std::vector<double> h_list;
  std::vector<EigRunResult> runs;
  // coc of |lambda_i - ref_i| between consecutive h, per eigenvalue index.
  std::vector<std::vector<std::optional<double>>> rates;
};
EigSweepResult run_eig_sweep(const EigConfig& config, const std::vector<double>& h_list);

// ---- table emission ------------------------------------------------------

enum class TableFormat { csv, md };

// BVP tables: columns h, rel_err, coc; one block per alpha.
std::string format_bvp_sweep(const BvpSweepResult& r, TableFormat fmt);
// Eigenvalue run: columns index, lambda, ref, rel_err, flag.
std::string format_eig_run(const EigRunResult& r, TableFormat fmt);
std::string format_eig_sweep(const EigSweepResult& r, TableFormat fmt);

}  // namespace maxip
