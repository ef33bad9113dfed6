#include "maxip/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace maxip {

Factorization::Factorization(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw SolverError("factorize: matrix must be square");
  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  SparseMatrix mc = m;
  mc.makeCompressed();
  lu_->analyzePattern(mc);
  lu_->factorize(mc);
  if (lu_->info() != Eigen::Success)
    throw SolverError("factorize: matrix is singular (" + lu_->lastErrorMessage() + ")");
  // An exactly singular U still reports success; probe for the zero pivot.
  const Eigen::VectorXd probe = lu_->solve(Eigen::VectorXd::Ones(m.rows()));
  for (int i = 0; i < probe.size(); ++i) {
    if (!std::isfinite(probe[i]))
      throw SolverError("factorize: matrix is numerically singular, zero pivot hit at dof " +
                        std::to_string(i));
  }
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != lu_->rows())
    throw SolverError("solve: right-hand side size does not match the factorization");
  return lu_->solve(rhs);
}

Factorization factorize(const SparseMatrix& m) { return Factorization(m); }

Eigen::VectorXd solve_linear(const Factorization& f, const Eigen::VectorXd& rhs) {
  return f.solve(rhs);
}

namespace {

double inf_norm(const SparseMatrix& a) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      row_sums[it.row()] += std::abs(it.value());
  return row_sums.size() > 0 ? row_sums.maxCoeff() : 0.0;
}

double backward_error(const SparseMatrix& a, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& b, double a_norm) {
  const double num = (a * x - b).lpNorm<Eigen::Infinity>();
  const double den = a_norm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  return den > 0 ? num / den : num;
}

}  // namespace

DiscreteField solve_bvp(const FeSystem& fe, const CoefficientField& coeffs,
                        const PenaltyParams& params, const VectorBySubdomain& g,
                        const BoundaryTrace& g_t, BvpInfo* info) {
  const SparseMatrix a = assemble_ah(fe, coeffs, params);
  const Eigen::VectorXd b = assemble_rhs(fe, coeffs, params, g, g_t);
  const Factorization f(a);
  Eigen::VectorXd x = f.solve(b);

  const double a_norm = inf_norm(a);
  double eta = backward_error(a, x, b, a_norm);
  int steps = 0;
  if (eta > 1e-12) {
    x += f.solve(b - a * x);
    eta = backward_error(a, x, b, a_norm);
    steps = 1;
  }
  if (info) {
    info->backward_error = eta;
    info->refinement_steps = steps;
    info->n_xh = fe.n_xh;
    info->n_mh = fe.n_mh;
  }
  DiscreteField out;
  out.e = x.head(fe.n_xh);
  out.p = x.tail(fe.n_mh);
  return out;
}

EigenPairs shift_invert_lanczos(const SparseMatrix& a, const SparseMatrix& b, int k,
                                double tol, const LanczosOptions& opts) {
  const int n = static_cast<int>(a.rows());
  if (a.rows() != a.cols() || b.rows() != b.cols() || b.rows() != n)
    throw std::invalid_argument("lanczos: matrices must be square and of equal size");
  if (k < 1 || k > n) throw std::invalid_argument("lanczos: k must lie in [1, n]");
  if (!(tol > 0)) throw std::invalid_argument("lanczos: tolerance must be positive");

  const Factorization f(a);
  const int m_max =
      opts.max_basis > 0 ? std::min(opts.max_basis, n) : std::min(n, std::max(10 * k + 60, 200));

  // Basis of the Krylov space of C = A^{-1} B, orthonormal in the B-inner
  // product; bq stores B q alongside to avoid repeated multiplications.
  std::vector<Eigen::VectorXd> q, bq;
  q.reserve(m_max);
  bq.reserve(m_max);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m_max + 1, m_max);

  std::mt19937 gen(opts.restart_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  // Push a new direction: map through C (so the basis stays inside the range
  // of A^{-1} B, never exciting infinite eigenvalues of the pencil), then
  // B-orthogonalize against the existing basis.  Returns false when the
  // candidate has no new B-component (range exhausted).
  auto append_direction = [&](Eigen::VectorXd v) -> bool {
    v = f.solve(b * v);
    if (opts.project) opts.project(v);
    for (int pass = 0; pass < 2; ++pass)
      for (size_t i = 0; i < q.size(); ++i) v -= bq[i].dot(v) * q[i];
    Eigen::VectorXd bv = b * v;
    const double norm2 = v.dot(bv);
    if (!(norm2 > opts.breakdown_tol * opts.breakdown_tol)) return false;
    const double norm = std::sqrt(norm2);
    q.push_back(v / norm);
    bq.push_back(bv / norm);
    return true;
  };

  {
    Eigen::VectorXd start =
        opts.start ? *opts.start : Eigen::VectorXd(Eigen::VectorXd::Ones(n));
    if (start.size() != n)
      throw std::invalid_argument("lanczos: start vector size does not match the matrices");
    bool ok = append_direction(start);
    for (int attempt = 0; !ok && attempt < 3; ++attempt) {
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) r[i] = unif(gen);
      ok = append_direction(r);
    }
    if (!ok) throw SolverError("lanczos: no nonzero direction in the range of B");
  }

  Eigen::VectorXd ritz_values;
  Eigen::MatrixXd ritz_vectors;
  std::vector<int> selected;
  int m = 0;
  bool exhausted = false;

  auto rayleigh_ritz = [&](int mm) {
    Eigen::MatrixXd hm = h.topLeftCorner(mm, mm);
    hm = 0.5 * (hm + hm.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
    ritz_values = es.eigenvalues();
    ritz_vectors = es.eigenvectors();
    // nu = eigenvalue of C; pencil eigenvalue is 1/nu.  Pick the k largest
    // |nu| (smallest-magnitude pencil eigenvalues), skipping numerically
    // vanishing nu.
    const double floor = 1e-12 * ritz_values.cwiseAbs().maxCoeff();
    std::vector<int> order(mm);
    for (int i = 0; i < mm; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      return std::abs(ritz_values[i]) > std::abs(ritz_values[j]);
    });
    selected.clear();
    for (int i : order) {
      if (std::abs(ritz_values[i]) <= floor) break;
      selected.push_back(i);
      if (static_cast<int>(selected.size()) == k) break;
    }
  };

  // Forms the selected Ritz pairs, B-normalizes them, sorts ascending and
  // recomputes the true residuals from the input matrices.
  auto extract_pairs = [&](int mm) -> EigenPairs {
    EigenPairs out;
    out.iterations = mm;
    struct Pair {
      double lambda;
      Eigen::VectorXd x;
    };
    std::vector<Pair> pairs;
    for (int i : selected) {
      Pair p;
      p.lambda = 1.0 / ritz_values[i];
      p.x = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < mm; ++j) p.x += ritz_vectors(j, i) * q[j];
      pairs.push_back(std::move(p));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& l, const Pair& r) { return l.lambda < r.lambda; });
    for (auto& p : pairs) {
      const double bnorm = std::sqrt(std::max(p.x.dot(b * p.x), 0.0));
      if (bnorm > 0) p.x /= bnorm;
      out.values.push_back(p.lambda);
      out.residuals.push_back((a * p.x - p.lambda * (b * p.x)).norm() /
                              (bnorm > 0 ? 1.0 : std::max(p.x.norm(), 1e-300)));
      out.vectors.push_back(std::move(p.x));
    }
    return out;
  };

  while (m < m_max) {
    // One Arnoldi step in the B-inner product (equals Lanczos with full
    // reorthogonalization because C is B-self-adjoint).
    Eigen::VectorXd w = f.solve(b * q[m]);
    // Re-project: the deflated subspace is invariant, so this only removes
    // components reintroduced by roundoff, like the reorthogonalization below.
    if (opts.project) opts.project(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= m; ++i) {
        const double c = bq[i].dot(w);
        w -= c * q[i];
        h(i, m) += c;
      }
    }
    Eigen::VectorXd bw = b * w;
    const double beta2 = w.dot(bw);
    ++m;

    const bool have_next = beta2 > opts.breakdown_tol * opts.breakdown_tol;
    if (have_next) {
      const double beta = std::sqrt(beta2);
      h(m, m - 1) = beta;
      q.push_back(w / beta);
      bq.push_back(bw / beta);
    } else {
      // Breakdown: the basis spans an invariant subspace.  Restart with a
      // random direction; the projected matrix stays valid because the
      // connecting coefficient is zero.
      h(m, m - 1) = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = unif(gen);
        ok = append_direction(r);
      }
      if (!ok) exhausted = true;
      // With a fresh direction appended, postpone the convergence test one
      // step: the invariant subspace found so far may miss wanted pairs.
      if (!exhausted) continue;
    }

    if (exhausted) break;
    if (m < std::min(k + 2, m_max)) continue;

    rayleigh_ritz(m);
    if (static_cast<int>(selected.size()) < std::min(k, m)) continue;
    // Residual of each Ritz pair from the last-column remainder:
    // ||A x - lambda B x|| = |lambda| * beta_m * |y_i[m]| * ||A q_{m+1}||.
    const double beta = h(m, m - 1);
    const double aq_norm = beta != 0.0 ? (a * q[m]).norm() : 0.0;
    bool all_converged = true;
    for (int i : selected) {
      const double lambda = 1.0 / ritz_values[i];
      const double est = std::abs(lambda) * beta * std::abs(ritz_vectors(m - 1, i)) * aq_norm;
      if (est > tol) {
        all_converged = false;
        break;
      }
    }
    if (!all_converged) continue;
    // Estimates passed; accept only if the recomputed residuals agree.
    EigenPairs candidate = extract_pairs(m);
    bool verified = true;
    for (double r : candidate.residuals)
      if (!(r <= tol)) verified = false;
    if (verified) return candidate;
  }

  rayleigh_ritz(m);
  EigenPairs out = extract_pairs(m);
  bool within_tol = true;
  for (double r : out.residuals)
    if (!(r <= tol)) within_tol = false;
  if (!within_tol) {
    const std::string reason = exhausted ? "the range of B was exhausted"
                                         : "basis limit " + std::to_string(m_max) +
                                               " was reached";
    throw LanczosNotConverged("lanczos: " + reason +
                                  " before all requested pairs met the residual tolerance",
                              std::move(out));
  }
  return out;
}

EigenResult solve_eigs(const FeSystem& fe, const CoefficientField& coeffs,
                       const PenaltyParams& params, int k, double tol,
                       bool allow_alpha_one, const LanczosOptions& extra) {
  const Pencil p = assemble_pencil(fe, coeffs, params, allow_alpha_one);
  LanczosOptions opts = extra;
  if (fe.n_mh > 0) {
    // Deflate the pure-multiplier eigenvalue family (see header): keep the
    // basis B'-orthogonal to span{(0, p)} by fixing the multiplier block of
    // every basis vector to the value that zeroes the p-rows of B' v.
    const SparseMatrix b_pe = p.b.block(fe.n_xh, 0, fe.n_mh, fe.n_xh);
    const SparseMatrix b_pp = p.b.block(fe.n_xh, fe.n_xh, fe.n_mh, fe.n_mh);
    auto chol = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(b_pp);
    if (chol->info() != Eigen::Success)
      throw SolverError("eigs: factorization of the multiplier mass block failed");
    opts.project = [chol, b_pe, user = extra.project, n_xh = fe.n_xh,
                    n_mh = fe.n_mh](Eigen::VectorXd& v) {
      if (user) user(v);
      v.tail(n_mh) = -chol->solve(b_pe * v.head(n_xh));
    };
  }
  const EigenPairs pairs = shift_invert_lanczos(p.a, p.b, k, tol, opts);
  EigenResult out;
  out.values = pairs.values;
  out.residuals = pairs.residuals;
  out.iterations = pairs.iterations;
  out.pencil_c = p.c;
  for (const auto& x : pairs.vectors) {
    DiscreteField fdf;
    fdf.e = x.head(fe.n_xh);
    fdf.p = x.tail(fe.n_mh);
    out.fields.push_back(std::move(fdf));
  }
  return out;
}

}  // namespace maxip
