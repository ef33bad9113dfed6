#pragma once

// Direct sparse solves and the shift-invert Lanczos eigensolver.
//
// The boundary value problem is a single factorize + solve; one step of
// iterative refinement keeps the backward error near machine precision.
//
// The eigensolver runs Lanczos on C = A'^{-1} B' in the B'-inner product
// (shift 0, direct factorization of A') with full reorthogonalization, a
// deterministic all-ones start vector, and random restarts on breakdown
// (B'-norm below 1e-14).  B' is only semidefinite; directions with vanishing
// B'-norm correspond to infinite pencil eigenvalues and are never excited
// because every Krylov vector passes through A'^{-1} B'.  Reported values are
// the k smallest-magnitude pencil eigenvalues lambda = 1/nu, sorted
// ascending, each with the true residual ||A' x - lambda B' x|| / ||x||_B'
// recomputed from the input matrices.

#include "maxip/assembly.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <vector>

namespace maxip {

class Factorization {
 public:
  explicit Factorization(const SparseMatrix& m);   // throws SolverError when singular
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int rows() const { return static_cast<int>(lu_->rows()); }

 private:
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

Factorization factorize(const SparseMatrix& m);
Eigen::VectorXd solve_linear(const Factorization& f, const Eigen::VectorXd& rhs);

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BvpInfo {
  double backward_error = 0.0;   // ||Ax-b||_inf / (||A||_inf ||x||_inf + ||b||_inf)
  int refinement_steps = 0;
  int n_xh = 0, n_mh = 0;
};

DiscreteField solve_bvp(const FeSystem& fe, const CoefficientField& coeffs,
                        const PenaltyParams& params, const VectorBySubdomain& g,
                        const BoundaryTrace& g_t, BvpInfo* info = nullptr);

struct LanczosOptions {
  int max_basis = 0;             // 0: automatic
  double breakdown_tol = 1e-14;
  std::optional<Eigen::VectorXd> start;   // default: all ones
  unsigned restart_seed = 20240u;
  // Optional deflation: applied to every candidate basis vector.  Must be a
  // projector onto a C-invariant subspace that is B-orthogonal to the
  // unwanted eigenspace; the returned spectrum is then that of the
  // restriction.  Used to remove eigenspaces that are known in closed form.
  std::function<void(Eigen::VectorXd&)> project;
};

struct EigenPairs {
  std::vector<double> values;              // ascending
  std::vector<Eigen::VectorXd> vectors;    // B'-normalized
  std::vector<double> residuals;           // ||A x - lambda B x|| / ||x||_B
  int iterations = 0;
};

// Thrown when the basis limit is reached before the requested pairs meet the
// residual tolerance; carries whatever converged so far.
struct LanczosNotConverged : SolverError {
  LanczosNotConverged(const std::string& what, EigenPairs partial_pairs)
      : SolverError(what), partial(std::move(partial_pairs)) {}
  EigenPairs partial;
};

// k smallest-magnitude eigenvalues of A x = lambda B x with A symmetric
// nonsingular and B symmetric positive semidefinite.  Reported residuals are
// recomputed from the input matrices, never from the recurrence.
EigenPairs shift_invert_lanczos(const SparseMatrix& a, const SparseMatrix& b, int k,
                                double tol, const LanczosOptions& opts = {});

struct EigenResult {
  std::vector<double> values;
  std::vector<DiscreteField> fields;
  std::vector<double> residuals;
  int iterations = 0;
  double pencil_c = 0.0;
};

// The pencil owns one exactly-known eigenvalue family: pure multiplier pairs
// (0, p) satisfy A' (0,p) = -(1/c) B' (0,p), so every p in M_h contributes the
// eigenvalue -1/c.  These are the discrete image of the gradient kernel of
// the continuous solution operator (its eigenvalue tends to zero with h) and
// are not Maxwell approximations.  solve_eigs deflates the family by keeping
// the Krylov basis B'-orthogonal to it, which leaves the remaining spectrum
// untouched: eigenvectors of a symmetric pencil for distinct eigenvalues are
// B'-orthogonal, and the complement is invariant under A'^{-1} B'.

// Extra options are merged with the deflation projector that solve_eigs
// installs itself; a user projector, if any, runs first.
EigenResult solve_eigs(const FeSystem& fe, const CoefficientField& coeffs,
                       const PenaltyParams& params, int k, double tol = 1e-8,
                       bool allow_alpha_one = false, const LanczosOptions& extra = {});

}  // namespace maxip
