#include "drdmft/eigsolve.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>
#include <random>

#include "drdmft/errors.hpp"

namespace drdmft {

namespace {

Eigen::VectorXd random_unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  v.normalize();
  return v;
}

// Classical Gram-Schmidt against the first j columns of V, applied twice.
void orthogonalize(const Eigen::MatrixXd& V, Eigen::Index j, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    if (j > 0) w.noalias() -= V.leftCols(j) * (V.leftCols(j).transpose() * w);
  }
}

} // namespace

EigResult lowest_eigenpairs_dense(const SymOp& op, int n_states) {
  const Eigen::Index n = static_cast<Eigen::Index>(op.n);
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e.data(), A.col(j).data());
    e[j] = 0.0;
  }
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  EigResult r;
  r.values = es.eigenvalues().head(n_states);
  r.vectors = es.eigenvectors().leftCols(n_states);
  r.converged = true;
  r.max_residual = 0.0;
  r.iterations = 1;
  return r;
}

EigResult lanczos_lowest(const SymOp& op, const LanczosOptions& opts) {
  const Eigen::Index n = static_cast<Eigen::Index>(op.n);
  const int k_want = opts.n_states;
  const int k_keep = std::min(opts.max_basis - 4, std::max(2 * k_want + 2, k_want + 6));
  const int m = opts.max_basis;
  if (m < k_want + 8) {
    throw MemoryBudgetExceeded(
        fmt::format("Lanczos basis of {} vectors is too small for {} states", m, k_want));
  }

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd V(n, m);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd w(n), Av(n);

  Eigen::VectorXd v0 = random_unit_vector(op.n, rng);
  if (opts.project) {
    opts.project(v0.data());
    v0.normalize();
  }
  V.col(0) = v0;

  int p = 0; // retained (locked) Ritz vectors at the head of V
  Eigen::VectorXd prev_ritz = Eigen::VectorXd::Constant(k_want, 1e30);
  EigResult result;

  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    // Expand the basis from column p to m-1. Column p is the continuation
    // vector; T already carries the locked block and its coupling column.
    int j = p;
    double beta = 0.0;
    for (; j < m; ++j) {
      op.apply(V.col(j).data(), Av.data());
      if (opts.project) opts.project(Av.data());
      const double alpha = V.col(j).dot(Av);
      T(j, j) = alpha;
      w = Av;
      orthogonalize(V, j + 1, w);
      beta = w.norm();
      if (j + 1 >= m) break;
      if (beta < 1e-13) {
        // Invariant subspace hit; continue with a fresh direction.
        w = random_unit_vector(op.n, rng);
        if (opts.project) opts.project(w.data());
        orthogonalize(V, j + 1, w);
        const double nw = w.norm();
        if (nw < 1e-13) break; // space exhausted
        w /= nw;
        V.col(j + 1) = w;
        T(j, j + 1) = 0.0;
        T(j + 1, j) = 0.0;
      } else {
        V.col(j + 1) = w / beta;
        T(j, j + 1) = beta;
        T(j + 1, j) = beta;
      }
    }
    const int used = std::min(j + 1, m);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(used, used));
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& s = es.eigenvectors();

    // Residual estimates: |beta_m * s(last, i)| for the trailing coupling.
    Eigen::VectorXd resid(k_want);
    for (int i = 0; i < k_want; ++i) resid[i] = std::abs(beta * s(used - 1, i));

    double dE = 0.0;
    for (int i = 0; i < k_want; ++i) dE = std::max(dE, std::abs(theta[i] - prev_ritz[i]));
    prev_ritz = theta.head(k_want);

    const double max_resid = resid.maxCoeff();
    result.max_residual = max_resid;
    if (max_resid < opts.resid_tol && dE < opts.eps_energy) {
      result.values = theta.head(k_want);
      result.vectors.noalias() = V.leftCols(used) * s.leftCols(k_want);
      for (int i = 0; i < k_want; ++i) result.vectors.col(i).normalize();
      result.converged = true;
      result.max_residual = max_resid;
      result.iterations = restart + 1;
      return result;
    }

    // Thick restart: keep the lowest k_keep Ritz vectors plus the residual
    // continuation vector.
    const int keep = std::min(k_keep, used - 1);
    Eigen::MatrixXd kept = V.leftCols(used) * s.leftCols(keep);
    Eigen::VectorXd cont;
    if (beta > 1e-13) {
      cont = w / beta;
    } else {
      cont = random_unit_vector(op.n, rng);
      if (opts.project) opts.project(cont.data());
    }
    V.leftCols(keep) = kept;
    // Re-orthonormalize the continuation vector against the kept block.
    orthogonalize(V, keep, cont);
    const double cn = cont.norm();
    if (cn < 1e-13) {
      cont = random_unit_vector(op.n, rng);
      if (opts.project) opts.project(cont.data());
      orthogonalize(V, keep, cont);
    }
    V.col(keep) = cont / cont.norm();

    T.setZero();
    for (int i = 0; i < keep; ++i) {
      T(i, i) = theta[i];
      const double b = beta * s(used - 1, i);
      T(i, keep) = b;
      T(keep, i) = b;
    }
    p = keep;
  }
  throw NoConvergence(fmt::format("Lanczos did not converge within {} restarts (residual {:.3e})",
                                  opts.max_restarts, result.max_residual));
}

double spectral_upper_bound(const SymOp& op, int steps, std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(op.n);
  const int m = std::min<int>(steps, static_cast<int>(n));
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd V(n, m);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd w(n);
  V.col(0) = random_unit_vector(op.n, rng);
  double beta = 0.0;
  int used = m;
  for (int j = 0; j < m; ++j) {
    op.apply(V.col(j).data(), w.data());
    const double alpha = V.col(j).dot(w);
    T(j, j) = alpha;
    orthogonalize(V, j + 1, w);
    beta = w.norm();
    if (j + 1 >= m) break;
    if (beta < 1e-13) {
      used = j + 1;
      break;
    }
    V.col(j + 1) = w / beta;
    T(j, j + 1) = beta;
    T(j + 1, j) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(used, used));
  const double top = es.eigenvalues()(used - 1);
  return top + std::abs(beta) + 1e-8 + 0.01 * std::abs(top);
}

EigResult chefsi_lowest(const SymOp& op, const ChefsiOptions& opts, const Eigen::MatrixXd& guess) {
  const Eigen::Index n = static_cast<Eigen::Index>(op.n);
  const int k = opts.n_states;
  const int b = std::min<int>(k + opts.block_extra, static_cast<int>(n));
  if (b < k) throw NoConvergence("chefsi: block smaller than the number of wanted states");

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd Y(n, b);
  const int g = std::min<int>(static_cast<int>(guess.cols()), b);
  if (g > 0) Y.leftCols(g) = guess.leftCols(g);
  for (int c = g; c < b; ++c) Y.col(c) = random_unit_vector(op.n, rng);

  const double lambda_ub = spectral_upper_bound(op, 40, opts.seed ^ 0x9e3779b9ULL);

  Eigen::MatrixXd AY(n, b), Yt(n, b);
  auto apply_block = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    for (int c = 0; c < in.cols(); ++c) op.apply(in.col(c).data(), out.col(c).data());
  };

  EigResult result;
  Eigen::VectorXd theta;
  double lower_edge = 0.0;
  bool have_edge = false;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (have_edge) {
      // Chebyshev filter amplifying [min, lower_edge] against [lower_edge, ub].
      // Three-term recurrence with Y = t_{d-2} and Yt = t_{d-1} on entry.
      const double e = 0.5 * (lambda_ub + lower_edge);
      const double c = 0.5 * (lambda_ub - lower_edge);
      apply_block(Y, AY);
      Yt = (AY - e * Y) / c;
      for (int d = 2; d <= opts.degree; ++d) {
        apply_block(Yt, AY);
        Y = (2.0 / c) * (AY - e * Yt) - Y;
        Y.swap(Yt);
      }
      Y = Yt;
    }

    // Rayleigh-Ritz on the (orthonormalized) block.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Y = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);
    apply_block(Y, AY);
    Eigen::MatrixXd H = Y.transpose() * AY;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    theta = es.eigenvalues();
    Y = (Y * es.eigenvectors()).eval();
    AY = (AY * es.eigenvectors()).eval();

    double max_resid = 0.0;
    for (int i = 0; i < k; ++i) {
      max_resid = std::max(max_resid, (AY.col(i) - theta[i] * Y.col(i)).norm());
    }
    result.iterations = iter + 1;
    result.max_residual = max_resid;
    if (max_resid < opts.resid_tol) {
      result.values = theta.head(k);
      result.vectors = Y.leftCols(k);
      result.converged = true;
      return result;
    }
    lower_edge = theta[b - 1] + 1e-6;
    have_edge = true;
  }
  throw NoConvergence(fmt::format("chefsi did not reach residual {:.1e} within {} iterations (at {:.3e})",
                                  opts.resid_tol, opts.max_iter, result.max_residual));
}

} // namespace drdmft
