#include "drdmft/spbasis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "drdmft/eigsolve.hpp"

namespace drdmft {

namespace {

// Dense matrix of the 1D operator -f''/2 + diag(v) on one axis.
Eigen::MatrixXd axis_operator(const Axis& ax, const Eigen::VectorXd& v) {
  const int n = ax.n;
  UniformGrid g(std::vector<Axis>{ax});
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    add_scaled_laplacian(g, e.data(), A.col(j).data(), {}, -0.5);
    e[j] = 0.0;
  }
  A.diagonal() += v;
  return A;
}

// Product-state guess block for the Chebyshev solver: eigenvectors of the
// separable surrogate (coupling terms dropped), lowest combined energies.
Eigen::MatrixXd separable_guess(const ModelSpec& model, const UniformGrid& grid, int block) {
  const int dim = grid.dim();
  std::vector<Eigen::MatrixXd> vecs(static_cast<std::size_t>(dim));
  std::vector<Eigen::VectorXd> vals(static_cast<std::size_t>(dim));

  for (int a = 0; a < dim; ++a) {
    const Axis& ax = grid.axis(a);
    Eigen::VectorXd v(ax.n);
    for (int i = 0; i < ax.n; ++i) {
      const double c = ax.point(i);
      if (a == 0) {
        double lam2 = 0.0;
        for (const auto& m : model.modes) lam2 += m.lambda * m.lambda;
        v[i] = bare_potential(c, model.potential) + 0.5 * lam2 * c * c;
      } else {
        const double w = model.modes[static_cast<std::size_t>(a - 1)].omega;
        v[i] = 0.5 * w * w * c * c;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(axis_operator(ax, v));
    const int keep = std::min<int>(ax.n, block + 4);
    vecs[static_cast<std::size_t>(a)] = es.eigenvectors().leftCols(keep);
    vals[static_cast<std::size_t>(a)] = es.eigenvalues().head(keep);
  }

  // Enumerate product states by combined energy.
  std::vector<std::vector<int>> combos;
  std::vector<double> energies;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::function<void(int)> walk = [&](int a) {
    if (a == dim) {
      double e = 0.0;
      for (int b = 0; b < dim; ++b) e += vals[static_cast<std::size_t>(b)][idx[static_cast<std::size_t>(b)]];
      combos.push_back(idx);
      energies.push_back(e);
      return;
    }
    for (int i = 0; i < vals[static_cast<std::size_t>(a)].size(); ++i) {
      idx[static_cast<std::size_t>(a)] = i;
      walk(a + 1);
    }
  };
  walk(0);
  std::vector<std::size_t> order(combos.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return energies[i] < energies[j]; });

  const int b = std::min<int>(block, static_cast<int>(combos.size()));
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(grid.size()), b);
  std::vector<std::size_t> strides(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) strides[static_cast<std::size_t>(a)] = grid.stride(a);
  for (int c = 0; c < b; ++c) {
    const auto& combo = combos[order[static_cast<std::size_t>(c)]];
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double val = 1.0;
      std::size_t rem = p;
      for (int a = 0; a < dim; ++a) {
        const std::size_t i = rem / strides[static_cast<std::size_t>(a)];
        rem %= strides[static_cast<std::size_t>(a)];
        val *= vecs[static_cast<std::size_t>(a)](static_cast<Eigen::Index>(i),
                                                 combo[static_cast<std::size_t>(a)]);
      }
      Y(static_cast<Eigen::Index>(p), c) = val;
    }
  }
  return Y;
}

} // namespace

int node_count_x(const UniformGrid& grid, const Eigen::VectorXd& orbital, double floor) {
  const int nx = grid.axis(0).n;
  const std::size_t sx = grid.stride(0);
  Eigen::VectorXd profile = Eigen::VectorXd::Zero(nx);
  if (grid.dim() == 1) {
    profile = orbital;
  } else {
    // Signed marginal over the q axes; if it collapses (odd q part), use the
    // slice through the largest-amplitude point instead.
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      for (std::size_t r = 0; r < sx; ++r) s += orbital[static_cast<Eigen::Index>(i * sx + r)];
      profile[i] = s;
    }
    const double mprof = profile.cwiseAbs().maxCoeff();
    const double morb = orbital.cwiseAbs().maxCoeff();
    if (mprof < 1e-8 * morb * static_cast<double>(sx)) {
      Eigen::Index imax = 0;
      orbital.cwiseAbs().maxCoeff(&imax);
      const std::size_t r = static_cast<std::size_t>(imax) % sx;
      for (int i = 0; i < nx; ++i) profile[i] = orbital[static_cast<Eigen::Index>(i * sx + r)];
    }
  }
  const double cut = floor * profile.cwiseAbs().maxCoeff();
  int nodes = 0;
  double last = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double v = profile[i];
    if (std::abs(v) <= cut) continue;
    if (last != 0.0 && v * last < 0.0) ++nodes;
    last = v;
  }
  return nodes;
}

OrbitalSet ip_solve(const ModelSpec& model, const UniformGrid& grid, int n_orbitals,
                    const IpOptions& opts) {
  if (grid.dim() != 1 + model.n_modes()) {
    throw ArityMismatch(fmt::format("ip_solve: grid has {} axes, model needs {}", grid.dim(),
                                    1 + model.n_modes()));
  }
  if (n_orbitals < 1 || static_cast<std::size_t>(n_orbitals) > grid.size()) {
    throw TooSmall(fmt::format("ip_solve: cannot produce {} orbitals on {} grid points", n_orbitals,
                               grid.size()));
  }
  OneBodyOperator h1(model, grid);
  SymOp op;
  op.n = grid.size();
  op.apply = [&h1](const double* in, double* out) { h1.apply(in, out); };

  EigResult eig;
  if (grid.size() <= opts.dense_threshold) {
    eig = lowest_eigenpairs_dense(op, n_orbitals);
  } else {
    ChefsiOptions copts;
    copts.n_states = n_orbitals;
    copts.block_extra = std::max(10, n_orbitals / 4);
    copts.degree = opts.chebyshev_degree;
    copts.resid_tol = opts.resid_tol;
    copts.max_iter = opts.max_iter;
    const Eigen::MatrixXd guess = separable_guess(model, grid, n_orbitals + copts.block_extra);
    eig = chefsi_lowest(op, copts, guess);
  }

  OrbitalSet set;
  set.grid = grid;
  set.eigenvalues = eig.values;
  set.orbitals = eig.vectors / std::sqrt(grid.cell_volume());
  set.n_gs = model.n_electrons / 2;
  set.n_es = n_orbitals - set.n_gs;

  // Deterministic ordering: eigenvalue first, node count within exact ties.
  std::vector<int> order(static_cast<std::size_t>(n_orbitals));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ea = set.eigenvalues[a], eb = set.eigenvalues[b];
    if (std::abs(ea - eb) > 1e-9) return ea < eb;
    return node_count_x(grid, set.orbitals.col(a)) < node_count_x(grid, set.orbitals.col(b));
  });
  OrbitalSet out = set;
  for (int i = 0; i < n_orbitals; ++i) {
    out.eigenvalues[i] = set.eigenvalues[order[static_cast<std::size_t>(i)]];
    out.orbitals.col(i) = set.orbitals.col(order[static_cast<std::size_t>(i)]);
    fix_sign(out.orbitals.col(i));
  }
  return out;
}

int IntegralTable::pair_index(int p, int q, int M) {
  if (p > q) std::swap(p, q);
  return p * M - p * (p - 1) / 2 + (q - p);
}

double IntegralTable::coulomb(int p, int q, int r, int s) const {
  if (!coulomb_enabled) return 0.0;
  const int a = pair_index(p, q, M);
  const int b = pair_index(r, s, M);
  return pair_rho.col(a).dot(pair_pot.col(b));
}

double IntegralTable::dressed(int p, int q, int r, int s) const {
  double val = coulomb(p, q, r, s);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(model.n_electrons));
  for (std::size_t a = 0; a < model.modes.size(); ++a) {
    const PhotonMode& m = model.modes[a];
    const double xpq = x_mom(p, q), xrs = x_mom(r, s);
    const double qpq = q_mom[a](p, q), qrs = q_mom[a](r, s);
    val += -m.omega * inv_sqrt_n * m.lambda * (qpq * xrs + xpq * qrs) + m.lambda * m.lambda * xpq * xrs;
  }
  return val;
}

IntegralTable build_integrals(const OrbitalSet& basis, const ModelSpec& model) {
  const int M = basis.size();
  const UniformGrid& grid = basis.grid;
  const std::size_t ng = grid.size();
  const double cv = grid.cell_volume();

  IntegralTable t;
  t.M = M;
  t.grid = grid;
  t.model = model;
  t.key = model_hash(model, grid);
  t.coulomb_enabled = model.interaction_enabled;

  // One-body matrix.
  OneBodyOperator h1(model, grid);
  Eigen::MatrixXd Hphi(static_cast<Eigen::Index>(ng), M);
  for (int j = 0; j < M; ++j) h1.apply(basis.orbitals.col(j).data(), Hphi.col(j).data());
  t.h = cv * basis.orbitals.transpose() * Hphi;
  t.h = 0.5 * (t.h + t.h.transpose()).eval();

  // Moment matrices.
  Eigen::VectorXd xs(static_cast<Eigen::Index>(ng));
  std::vector<double> z(static_cast<std::size_t>(grid.dim()));
  for (std::size_t p = 0; p < ng; ++p) {
    grid_point(grid, p, z);
    xs[static_cast<Eigen::Index>(p)] = z[0];
  }
  t.x_mom = cv * basis.orbitals.transpose() * xs.asDiagonal() * basis.orbitals;
  t.x_mom = 0.5 * (t.x_mom + t.x_mom.transpose()).eval();

  for (int a = 0; a < model.n_modes(); ++a) {
    Eigen::VectorXd qs(static_cast<Eigen::Index>(ng));
    for (std::size_t p = 0; p < ng; ++p) {
      grid_point(grid, p, z);
      qs[static_cast<Eigen::Index>(p)] = z[static_cast<std::size_t>(1 + a)];
    }
    Eigen::MatrixXd Q = cv * basis.orbitals.transpose() * qs.asDiagonal() * basis.orbitals;
    t.q_mom.push_back(0.5 * (Q + Q.transpose()));

    // Per-mode oscillator matrix -d2/dq2/2 + w^2 q^2 / 2.
    const double w = model.modes[static_cast<std::size_t>(a)].omega;
    Eigen::MatrixXd Osc(static_cast<Eigen::Index>(ng), M);
    const int axes[1] = {1 + a};
    for (int j = 0; j < M; ++j) {
      Eigen::VectorXd tmp = (0.5 * w * w) * qs.array().square().matrix().cwiseProduct(basis.orbitals.col(j));
      add_scaled_laplacian(grid, basis.orbitals.col(j).data(), tmp.data(), axes, -0.5);
      Osc.col(j) = tmp;
    }
    Eigen::MatrixXd O = cv * basis.orbitals.transpose() * Osc;
    t.q_osc.push_back(0.5 * (O + O.transpose()));
  }

  // Pair densities over x (q axes integrated out) and their Coulomb
  // potentials. The exchange-type kernel work happens once, here.
  const int nx = grid.axis(0).n;
  const double hx = grid.axis(0).spacing;
  const std::size_t sx = grid.stride(0);
  const double qweight = cv / hx;
  t.pair_rho.resize(nx, t.npair());
  for (int p = 0; p < M; ++p) {
    for (int q = p; q < M; ++q) {
      const int col = IntegralTable::pair_index(p, q, M);
      for (int i = 0; i < nx; ++i) {
        const double* up = basis.orbitals.col(p).data() + static_cast<std::size_t>(i) * sx;
        const double* uq = basis.orbitals.col(q).data() + static_cast<std::size_t>(i) * sx;
        double s = 0.0;
        for (std::size_t r = 0; r < sx; ++r) s += up[r] * uq[r];
        t.pair_rho(i, col) = qweight * s;
      }
    }
  }
  if (model.interaction_enabled) {
    Eigen::MatrixXd W(nx, nx);
    for (int i = 0; i < nx; ++i) {
      const double xi = grid.axis(0).point(i);
      for (int j = 0; j < nx; ++j) {
        W(i, j) = soft_coulomb(xi, grid.axis(0).point(j), model.interaction_softening);
      }
    }
    t.pair_pot = (hx * hx) * (W * t.pair_rho);
  } else {
    t.pair_pot = Eigen::MatrixXd::Zero(nx, t.npair());
  }
  return t;
}

} // namespace drdmft
