#include "drdmft/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace drdmft {

namespace {

Eigen::MatrixXd lowdin_orthonormalize(const Eigen::MatrixXd& C) {
  Eigen::MatrixXd S = C.transpose() * C;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-30).cwiseSqrt().cwiseInverse();
  return C * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

// exp(A) for antisymmetric A via scaling and squaring.
Eigen::MatrixXd exp_antisym(const Eigen::MatrixXd& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int k = 0;
  double scale = 1.0;
  while (norm * scale > 0.25 && k < 40) {
    scale *= 0.5;
    ++k;
  }
  const Eigen::MatrixXd B = A * scale;
  const Eigen::Index m = A.rows();
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(m, m);
  for (int i = 1; i <= 14; ++i) {
    term = (term * B / static_cast<double>(i)).eval();
    R += term;
  }
  for (int i = 0; i < k; ++i) R = (R * R).eval();
  return lowdin_orthonormalize(R);
}

Eigen::VectorXd aufbau_occupations(int M, int n_electrons) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(M);
  for (int i = 0; i < n_electrons / 2; ++i) n[i] = 2.0;
  return n;
}

// Transformed one- and two-body quantities for a fixed coefficient matrix.
struct Trans {
  Eigen::MatrixXd C;
  Eigen::MatrixXd h_no, x_no;
  std::vector<Eigen::MatrixXd> q_no, osc_no;
  Eigen::MatrixXd rho_no, pot_no; // n_x x M^2, column (i + j*M) holds pair (i,j)
  Eigen::MatrixXd J, K;

  struct SepTerm {
    double c;
    const Eigen::MatrixXd* U;
    const Eigen::MatrixXd* V;
  };
  std::vector<SepTerm> terms;
};

class Engine {
public:
  explicit Engine(const IntegralTable& table) : t_(table) {
    const int M = t_.M;
    if (t_.coulomb_enabled) {
      const Eigen::Index nx = t_.pair_rho.rows();
      rho_full_.resize(nx * M, M);
      pot_full_.resize(nx * M, M);
      for (int p = 0; p < M; ++p) {
        for (int q = 0; q < M; ++q) {
          const int col = IntegralTable::pair_index(p, q, M);
          for (Eigen::Index x = 0; x < nx; ++x) {
            rho_full_(x * M + p, q) = t_.pair_rho(x, col);
            pot_full_(x * M + p, q) = t_.pair_pot(x, col);
          }
        }
      }
    }
  }

  const IntegralTable& table() const { return t_; }

  Trans transform(const Eigen::MatrixXd& C) const {
    const int M = t_.M;
    Trans w;
    w.C = C;
    w.h_no = C.transpose() * t_.h * C;
    w.x_no = C.transpose() * t_.x_mom * C;
    for (const auto& Q : t_.q_mom) w.q_no.push_back(C.transpose() * Q * C);
    for (const auto& O : t_.q_osc) w.osc_no.push_back(C.transpose() * O * C);

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(t_.model.n_electrons));
    for (std::size_t a = 0; a < t_.model.modes.size(); ++a) {
      const PhotonMode& m = t_.model.modes[a];
      const double c1 = -m.omega * inv_sqrt_n * m.lambda;
      w.terms.push_back({c1, &w.x_no, &w.q_no[a]});
      w.terms.push_back({c1, &w.q_no[a], &w.x_no});
      w.terms.push_back({m.lambda * m.lambda, &w.x_no, &w.x_no});
    }

    if (t_.coulomb_enabled) {
      const Eigen::Index nx = t_.pair_rho.rows();
      w.rho_no.resize(nx, M * M);
      w.pot_no.resize(nx, M * M);
      // Half transform as one large product, then per-point sandwiches.
      Eigen::MatrixXd half_rho = rho_full_ * C;
      Eigen::MatrixXd half_pot = pot_full_ * C;
      Eigen::MatrixXd tmp(M, M);
      for (Eigen::Index x = 0; x < nx; ++x) {
        tmp.noalias() = C.transpose() * half_rho.middleRows(x * M, M);
        w.rho_no.row(x) = Eigen::Map<const Eigen::RowVectorXd>(tmp.data(), M * M);
        tmp.noalias() = C.transpose() * half_pot.middleRows(x * M, M);
        w.pot_no.row(x) = Eigen::Map<const Eigen::RowVectorXd>(tmp.data(), M * M);
      }
    }

    // Direct and exchange matrices J_ij = (ii|jj), K_ij = (ij|ij).
    w.J = Eigen::MatrixXd::Zero(M, M);
    w.K = Eigen::MatrixXd::Zero(M, M);
    if (t_.coulomb_enabled) {
      Eigen::MatrixXd diag_rho(w.rho_no.rows(), M), diag_pot(w.rho_no.rows(), M);
      for (int i = 0; i < M; ++i) {
        diag_rho.col(i) = w.rho_no.col(i + i * M);
        diag_pot.col(i) = w.pot_no.col(i + i * M);
      }
      w.J = diag_rho.transpose() * diag_pot;
      for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
          w.K(i, j) = w.rho_no.col(i + j * M).dot(w.pot_no.col(i + j * M));
        }
      }
    }
    for (const auto& term : w.terms) {
      w.J += term.c * term.U->diagonal() * term.V->diagonal().transpose();
      w.K += term.c * term.U->cwiseProduct(*term.V);
    }
    w.J = 0.5 * (w.J + w.J.transpose()).eval();
    w.K = 0.5 * (w.K + w.K.transpose()).eval();
    return w;
  }

  // Lagrange-multiplier (stationarity) matrix for the current orbitals.
  Eigen::MatrixXd lambda_matrix(const Trans& w, const Eigen::VectorXd& n) const {
    const int M = t_.M;
    Eigen::VectorXd s = n.cwiseMax(0.0).cwiseSqrt();

    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(M, M);
    Eigen::MatrixXd exch = Eigen::MatrixXd::Zero(M, M);
    if (t_.coulomb_enabled) {
      Eigen::VectorXd g_dir = Eigen::VectorXd::Zero(w.pot_no.rows());
      for (int k = 0; k < M; ++k) g_dir += n[k] * w.pot_no.col(k + k * M);
      Eigen::VectorXd dvec = w.rho_no.transpose() * g_dir; // entry (i + j*M)
      direct += Eigen::Map<const Eigen::MatrixXd>(dvec.data(), M, M);

      Eigen::MatrixXd Pk(M, M);
      for (int k = 0; k < M; ++k) {
        Pk.noalias() = w.rho_no.middleCols(k * M, M).transpose() * w.pot_no.middleCols(k * M, M);
        // Pk(i,j) = (ik|jk); weight each column j by f(n_j, n_k).
        for (int j = 0; j < M; ++j) exch.col(j) += (s[j] * s[k]) * Pk.col(j);
      }
    }
    for (const auto& term : w.terms) {
      const double tv = term.V->diagonal().dot(n);
      direct += (term.c * tv) * (*term.U);
      for (int j = 0; j < M; ++j) {
        Eigen::VectorXd wv = (s[j] * term.c) * s.cwiseProduct(term.V->col(j));
        exch.col(j) += (*term.U) * wv;
      }
    }
    return (w.h_no + direct) * n.asDiagonal() - exch;
  }

private:
  const IntegralTable& t_;
  Eigen::MatrixXd rho_full_, pot_full_;
};

double energy_value(const Trans& w, const Eigen::VectorXd& n, double* one_body = nullptr,
                    double* hartree = nullptr, double* xc = nullptr) {
  const Eigen::VectorXd s = n.cwiseMax(0.0).cwiseSqrt();
  const double e1 = n.dot(w.h_no.diagonal());
  const double eh = 0.5 * n.dot(w.J * n);
  const double ex = -0.5 * s.dot(w.K * s);
  if (one_body) *one_body = e1;
  if (hartree) *hartree = eh;
  if (xc) *xc = ex;
  return e1 + eh + ex;
}

EnergyReport report_from(const Engine& engine, const Trans& w, const Eigen::VectorXd& n) {
  EnergyReport r;
  r.total = energy_value(w, n, &r.one_body, &r.hartree, &r.xc);
  const ModelSpec& model = engine.table().model;
  for (std::size_t a = 0; a < w.osc_no.size(); ++a) {
    const double eph = n.dot(w.osc_no[a].diagonal());
    r.photon_mode_energy.push_back(eph);
    r.mode_occupation.push_back(eph / model.modes[a].omega - 0.5 * model.n_electrons);
  }
  return r;
}

void check_representability(const Eigen::VectorXd& n, int n_electrons) {
  const double lo = n.minCoeff();
  const double hi = n.maxCoeff();
  const double sum = n.sum();
  if (lo < -1e-10 || hi > 2.0 + 1e-10 || std::abs(sum - n_electrons) > 1e-8) {
    throw Error(fmt::format(
        "occupations left the N-representable set: min={:.3e} max={:.6f} sum={:.9f} (N={})", lo, hi,
        sum, n_electrons));
  }
}

// ---- occupation optimization ------------------------------------------------

struct OccProblem {
  Eigen::VectorXd hd;
  Eigen::MatrixXd J, K;
  double n_floor;

  double energy(const Eigen::VectorXd& n) const {
    const Eigen::VectorXd s = n.cwiseMax(0.0).cwiseSqrt();
    return n.dot(hd) + 0.5 * n.dot(J * n) - 0.5 * s.dot(K * s);
  }
  Eigen::VectorXd dE_dn(const Eigen::VectorXd& n) const {
    const Eigen::VectorXd s = n.cwiseMax(0.0).cwiseSqrt();
    const Eigen::VectorXd ks = K * s;
    Eigen::VectorXd g = hd + J * n;
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      g[i] -= 0.5 * ks[i] / std::sqrt(std::max(n[i], n_floor));
    }
    return g;
  }
};

Eigen::VectorXd angles_from_occ(const Eigen::VectorXd& n) {
  Eigen::VectorXd a(n.size());
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    a[i] = std::asin(std::sqrt(std::clamp(n[i] / 2.0, 0.0, 1.0)));
  }
  return a;
}

Eigen::VectorXd occ_from_angles(const Eigen::VectorXd& a) {
  Eigen::VectorXd n(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double s = std::sin(a[i]);
    n[i] = 2.0 * s * s;
  }
  return n;
}

// BFGS over the angles at fixed mu. Returns the reached objective value.
double minimize_angles(const OccProblem& prob, double mu, Eigen::VectorXd& alpha, int max_iter,
                       int* iterations = nullptr) {
  const Eigen::Index M = alpha.size();
  auto objective = [&](const Eigen::VectorXd& a, Eigen::VectorXd& grad) {
    const Eigen::VectorXd n = occ_from_angles(a);
    const Eigen::VectorXd dEdn = prob.dE_dn(n);
    grad.resize(M);
    for (Eigen::Index i = 0; i < M; ++i) grad[i] = (dEdn[i] - mu) * 2.0 * std::sin(2.0 * a[i]);
    return prob.energy(n) - mu * n.sum();
  };

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(M, M); // inverse Hessian
  Eigen::VectorXd g(M), g_new(M);
  double f = objective(alpha, g);
  int it = 0;
  for (; it < max_iter; ++it) {
    if (g.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, std::abs(f))) break;
    Eigen::VectorXd p = -(B * g);
    if (p.dot(g) > 0.0) p = -g; // reset on a non-descent direction
    double step = 1.0;
    const double slope = p.dot(g);
    double f_new = 0.0;
    Eigen::VectorXd a_new;
    bool ok = false;
    for (int ls = 0; ls < 50; ++ls) {
      a_new = alpha + step * p;
      f_new = objective(a_new, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    const Eigen::VectorXd sv = a_new - alpha;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-14) {
      const Eigen::VectorXd By = B * yv;
      const double yBy = yv.dot(By);
      B += ((sy + yBy) / (sy * sy)) * (sv * sv.transpose()) -
           (By * sv.transpose() + sv * By.transpose()) / sy;
    } else {
      B = Eigen::MatrixXd::Identity(M, M);
    }
    alpha = a_new;
    const double df = f - f_new;
    f = f_new;
    g = g_new;
    if (df < 1e-16 * std::max(1.0, std::abs(f))) break;
  }
  if (iterations) *iterations += it;
  return f;
}

} // namespace

EnergyReport energy(const OneRDM& rdm, const IntegralTable& table, Functional) {
  if (rdm.size() != table.M) {
    throw BasisMismatch(fmt::format("1RDM over {} orbitals, table over {}", rdm.size(), table.M));
  }
  Engine engine(table);
  Trans w = engine.transform(rdm.coeff);
  return report_from(engine, w, rdm.occ);
}

OccupationGradient occupation_gradient(const OneRDM& rdm, const IntegralTable& table, Functional,
                                       double n_floor) {
  Engine engine(table);
  Trans w = engine.transform(rdm.coeff);
  OccProblem prob{w.h_no.diagonal(), w.J, w.K, n_floor};
  OccupationGradient g;
  g.dE_dn = prob.dE_dn(rdm.occ);
  const Eigen::VectorXd a = angles_from_occ(rdm.occ);
  g.dE_dalpha.resize(rdm.size());
  for (int i = 0; i < rdm.size(); ++i) g.dE_dalpha[i] = g.dE_dn[i] * 2.0 * std::sin(2.0 * a[i]);
  return g;
}

OneRDM occupation_minimize(const OneRDM& rdm, const IntegralTable& table, Functional functional,
                           const SCFSettings& settings, OccupationStats* stats) {
  const int M = table.M;
  const int N = table.model.n_electrons;
  OccupationStats local;
  OneRDM out = rdm;

  if (N > 2 * M || N < 0) {
    throw MuBracketFailure(fmt::format("target particle number {} is infeasible with {} orbitals", N, M));
  }
  if (functional == Functional::HartreeFock || M == N / 2) {
    out.occ = aufbau_occupations(M, N);
    local.converged = true;
    if (stats) *stats = local;
    return out;
  }

  Engine engine(table);
  Trans w = engine.transform(rdm.coeff);
  OccProblem prob{w.h_no.diagonal(), w.J, w.K, settings.n_floor};

  Eigen::VectorXd alpha = angles_from_occ(rdm.occ);
  auto particle_number = [&](double mu) {
    minimize_angles(prob, mu, alpha, settings.max_occupation, &local.bfgs_iterations);
    return occ_from_angles(alpha).sum();
  };

  // Bracket mu so that N(mu) straddles the target.
  const Eigen::VectorXd dEdn0 = prob.dE_dn(out.occ.cwiseMax(1e-4));
  double mu0 = dEdn0.sum() / static_cast<double>(M);
  double step = std::max(1.0, 0.5 * (dEdn0.maxCoeff() - dEdn0.minCoeff()));
  double mu_lo = mu0, mu_hi = mu0;
  Eigen::VectorXd alpha_save = alpha;
  double g_lo = particle_number(mu_lo) - N;
  Eigen::VectorXd alpha_lo = alpha;
  double g_hi = g_lo;
  Eigen::VectorXd alpha_hi = alpha;
  int expand = 0;
  while (g_lo > 0.0 && expand < 60) {
    mu_lo -= step;
    step *= 1.6;
    alpha = alpha_save;
    g_lo = particle_number(mu_lo) - N;
    alpha_lo = alpha;
    ++expand;
  }
  step = std::max(1.0, 0.5 * (dEdn0.maxCoeff() - dEdn0.minCoeff()));
  while (g_hi < 0.0 && expand < 120) {
    mu_hi += step;
    step *= 1.6;
    alpha = alpha_save;
    g_hi = particle_number(mu_hi) - N;
    alpha_hi = alpha;
    ++expand;
  }
  if (g_lo > 0.0 || g_hi < 0.0) {
    throw MuBracketFailure(fmt::format("N(mu) does not straddle N={} over [{:.3e}, {:.3e}]", N, mu_lo, mu_hi));
  }

  double mu_prev = mu_lo;
  double mu = 0.5 * (mu_lo + mu_hi);
  double best_defect = 1e30;
  Eigen::VectorXd best_alpha = alpha;
  double best_mu = mu;
  bool mu_converged = false;
  for (int it = 0; it < 300; ++it) {
    mu = 0.5 * (mu_lo + mu_hi);
    alpha = 0.5 * (alpha_lo + alpha_hi);
    const double g = particle_number(mu) - N;
    ++local.mu_iterations;
    if (std::abs(g) < best_defect) {
      best_defect = std::abs(g);
      best_alpha = alpha;
      best_mu = mu;
    }
    if (g < 0.0) {
      mu_lo = mu;
      alpha_lo = alpha;
    } else {
      mu_hi = mu;
      alpha_hi = alpha;
    }
    if (std::abs(mu - mu_prev) < settings.eps_mu) mu_converged = true;
    mu_prev = mu;
    if (mu_converged && best_defect < 1e-10 * std::max(1.0, static_cast<double>(N))) break;
    if (mu_hi - mu_lo < 1e-15 * std::max(1.0, std::abs(mu))) break;
  }

  Eigen::VectorXd n = occ_from_angles(best_alpha);
  // Tiny exact-N polish: spread the residual over the unpinned occupations.
  const double defect = N - n.sum();
  if (std::abs(defect) > 0.0) {
    Eigen::VectorXd room(n.size());
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      room[i] = defect > 0.0 ? std::max(0.0, 2.0 - n[i]) : std::max(0.0, n[i]);
    }
    const double total = room.sum();
    if (total > std::abs(defect)) {
      for (Eigen::Index i = 0; i < n.size(); ++i) n[i] += defect * room[i] / total;
    }
  }
  out.occ = n.cwiseMax(0.0).cwiseMin(2.0);
  local.mu = best_mu;
  local.converged = mu_converged;
  local.particle_defect = std::abs(out.occ.sum() - N);
  if (stats) *stats = local;
  return out;
}

double lambda_hermiticity_defect(const OneRDM& rdm, const IntegralTable& table, Functional,
                                 double) {
  Engine engine(table);
  Trans w = engine.transform(rdm.coeff);
  const Eigen::MatrixXd L = engine.lambda_matrix(w, rdm.occ);
  return (L - L.transpose()).cwiseAbs().maxCoeff();
}

OneRDM orbital_minimize(const OneRDM& rdm, const IntegralTable& table, Functional,
                        const SCFSettings& settings, OrbitalStats* stats) {
  Engine engine(table);
  OneRDM out = rdm;
  const int M = table.M;
  const Eigen::VectorXd& n = out.occ;

  Trans w = engine.transform(out.coeff);
  double E = energy_value(w, n);
  double E_prev = E;
  double beta = 1.0;
  OrbitalStats local;

  for (int it = 0; it < settings.max_orbital; ++it) {
    local.iterations = it + 1;
    const Eigen::MatrixXd L = engine.lambda_matrix(w, n);
    const Eigen::MatrixXd G = L - L.transpose();
    local.lambda_defect = G.cwiseAbs().maxCoeff();
    if (local.lambda_defect < settings.eps_lambda && std::abs(E - E_prev) < settings.eps_E && it > 0) {
      local.converged = true;
      break;
    }
    E_prev = E;

    // Gap-preconditioned rotation generator from the Lambda asymmetry.
    const Eigen::VectorXd eps = w.h_no.diagonal();
    const double spread = eps.maxCoeff() - eps.minCoeff();
    const double delta = std::max(1e-2, 1e-3 * spread);
    Eigen::MatrixXd D(M, M);
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) D(i, j) = std::max(std::abs(eps[j] - eps[i]), delta);
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      const Eigen::MatrixXd A = (-beta) * G.cwiseQuotient(D);
      const Eigen::MatrixXd R = exp_antisym(A);
      const Eigen::MatrixXd C_trial = lowdin_orthonormalize(out.coeff * R);
      Trans w_trial = engine.transform(C_trial);
      const double E_trial = energy_value(w_trial, n);
      if (E_trial <= E + 1e-13 * std::max(1.0, std::abs(E))) {
        out.coeff = C_trial;
        w = std::move(w_trial);
        E = E_trial;
        accepted = true;
        beta = std::min(beta * 1.25, 64.0);
        break;
      }
      beta *= 1.0 / 3.0;
    }
    if (!accepted) {
      // Numerically stationary: no admissible descent rotation left.
      local.converged = local.lambda_defect < settings.eps_lambda;
      break;
    }
  }
  local.energy = E;
  if (stats) *stats = local;
  return out;
}

namespace {

Field density_from(const OrbitalSet& basis, const OneRDM& rdm) {
  Field rho(basis.grid);
  const Eigen::MatrixXd no = basis.orbitals * rdm.coeff;
  for (int i = 0; i < rdm.size(); ++i) {
    if (rdm.occ[i] <= 0.0) continue;
    rho.values += rdm.occ[i] * no.col(i).cwiseAbs2();
  }
  return rho;
}

} // namespace

SolveResult solve(const ModelSpec& model, const UniformGrid& grid, int n_orbitals,
                  Functional functional, const SCFSettings& settings, const OneRDM* warm_start,
                  const IpOptions& ip_opts) {
  if (n_orbitals < model.n_electrons / 2) {
    throw TooSmall(fmt::format("need at least N/2 = {} orbitals, got {}", model.n_electrons / 2,
                               n_orbitals));
  }
  SolveResult res;
  res.basis = ip_solve(model, grid, n_orbitals, ip_opts);
  res.table = build_integrals(res.basis, model);
  Engine engine(res.table);

  const int M = n_orbitals;
  const int N = model.n_electrons;
  OneRDM rdm;
  rdm.basis_key = res.table.key;
  const bool warm = warm_start != nullptr && warm_start->size() == M;
  if (warm) {
    rdm.coeff = lowdin_orthonormalize(warm_start->coeff);
    rdm.occ = warm_start->occ.cwiseMax(0.0).cwiseMin(2.0);
    const double sum = rdm.occ.sum();
    if (std::abs(sum - N) > 1e-9 && sum > 0.0) rdm.occ *= static_cast<double>(N) / sum;
  } else {
    rdm.coeff = Eigen::MatrixXd::Identity(M, M);
    rdm.occ = aufbau_occupations(M, N);
  }

  // Hartree-Fock stage (also the Mueller starting point on cold starts).
  if (!warm || functional == Functional::HartreeFock) {
    Eigen::VectorXd mueller_occ = rdm.occ;
    rdm.occ = aufbau_occupations(M, N);
    OrbitalStats ost;
    rdm = orbital_minimize(rdm, res.table, Functional::HartreeFock, settings, &ost);
    if (warm && functional == Functional::Mueller) rdm.occ = mueller_occ;
  }

  if (functional == Functional::Mueller && !warm) {
    // Escape the pinned saddle: move 1e-2 from the HOMO to the next orbitals.
    const int homo = N / 2 - 1;
    const int spread = std::min(3, M - N / 2);
    if (spread > 0) {
      rdm.occ[homo] -= 1e-2;
      for (int k = 1; k <= spread; ++k) rdm.occ[homo + k] += 1e-2 / spread;
    }
  }

  Field rho_prev = density_from(res.basis, rdm);
  Trans w0 = engine.transform(rdm.coeff);
  double E_prev = energy_value(w0, rdm.occ);

  EnergyReport rep;
  double mu = 0.0;
  double lambda_defect = 0.0;
  bool conv_E = false, conv_rho = false, conv_lambda = false, conv_mu = true;

  for (int outer = 0; outer < settings.max_outer; ++outer) {
    rep.outer_iterations = outer + 1;

    if (functional == Functional::Mueller) {
      OccupationStats ostats;
      OneRDM trial = occupation_minimize(rdm, res.table, functional, settings, &ostats);
      Trans wt = engine.transform(trial.coeff);
      const double E_trial = energy_value(wt, trial.occ);
      if (E_trial <= E_prev + 1e-12 * std::max(1.0, std::abs(E_prev))) {
        rdm = trial;
        mu = ostats.mu;
        conv_mu = ostats.converged;
      }
      check_representability(rdm.occ, N);
    }

    OrbitalStats orb;
    rdm = orbital_minimize(rdm, res.table, functional, settings, &orb);
    lambda_defect = orb.lambda_defect;
    conv_lambda = orb.converged;

    Trans w = engine.transform(rdm.coeff);
    const double E = energy_value(w, rdm.occ);
    Field rho = density_from(res.basis, rdm);
    const double drho = grid.cell_volume() * (rho.values - rho_prev.values).cwiseAbs().sum();

    conv_E = std::abs(E - E_prev) < settings.eps_E;
    conv_rho = drho < settings.eps_rho;
    E_prev = E;
    rho_prev = std::move(rho);
    rep.delta_rho = drho;

    if (settings.iterate_hook) settings.iterate_hook(rdm, E);

    if (conv_E && conv_rho && conv_lambda && (functional == Functional::HartreeFock || conv_mu)) {
      break;
    }
  }

  Trans w = engine.transform(rdm.coeff);
  EnergyReport final_rep = report_from(engine, w, rdm.occ);
  final_rep.outer_iterations = rep.outer_iterations;
  final_rep.converged_energy = conv_E;
  final_rep.converged_density = conv_rho;
  final_rep.converged_lambda = conv_lambda;
  final_rep.lambda_defect = lambda_defect;
  final_rep.mu = mu;
  final_rep.delta_rho = rep.delta_rho;

  res.rdm = rdm;
  res.report = final_rep;
  return res;
}

GridHFResult grid_hartree_fock(const ModelSpec& model, const UniformGrid& grid_1d,
                               const SCFSettings& settings) {
  if (grid_1d.dim() != 1 || !model.modes.empty()) {
    throw ArityMismatch("grid_hartree_fock handles the bare electronic 1D problem only");
  }
  const int nx = grid_1d.axis(0).n;
  const int nocc = model.n_electrons / 2;
  const double h = grid_1d.axis(0).spacing;

  // Dense one-body matrix.
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(nx, nx);
  {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(nx);
    for (int j = 0; j < nx; ++j) {
      e[j] = 1.0;
      add_scaled_laplacian(grid_1d, e.data(), h1.col(j).data(), {}, -0.5);
      e[j] = 0.0;
    }
    for (int i = 0; i < nx; ++i) h1(i, i) += bare_potential(grid_1d.axis(0).point(i), model.potential);
  }
  Eigen::MatrixXd W(nx, nx);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nx; ++j) {
      W(i, j) = model.interaction_enabled
                    ? soft_coulomb(grid_1d.axis(0).point(i), grid_1d.axis(0).point(j),
                                   model.interaction_softening)
                    : 0.0;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h1);
  Eigen::MatrixXd phi = es.eigenvectors().leftCols(nocc) / std::sqrt(h);
  Eigen::MatrixXd P = 2.0 * phi * phi.transpose(); // spin-summed density matrix

  GridHFResult out;
  double E_prev = 0.0;
  Eigen::VectorXd rho_prev = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd fock_eigs;
  const double mix = settings.mixing > 0.0 && settings.mixing <= 1.0 ? settings.mixing : 1.0;

  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd rho = P.diagonal();
    const Eigen::VectorXd vh = h * (W * rho);
    Eigen::MatrixXd F = h1;
    F.diagonal() += vh;
    F -= (0.5 * h) * W.cwiseProduct(P);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fs(F);
    Eigen::MatrixXd phi_new = fs.eigenvectors().leftCols(nocc) / std::sqrt(h);
    Eigen::MatrixXd P_new = 2.0 * phi_new * phi_new.transpose();
    P = ((1.0 - mix) * P + mix * P_new).eval();
    phi = phi_new;
    fock_eigs = fs.eigenvalues().head(nocc);

    // Energy of the (unmixed) determinant.
    const Eigen::VectorXd rho_new = P_new.diagonal();
    const double e1 = h * (P_new.cwiseProduct(h1)).sum();
    const double eh = 0.5 * h * h * rho_new.dot(W * rho_new);
    const double ex = -0.25 * h * h * (P_new.cwiseProduct(W).cwiseProduct(P_new)).sum();
    const double E = e1 + eh + ex;

    const double drho = h * (rho_new - rho_prev).cwiseAbs().sum();
    out.iterations = it + 1;
    if (it > 0 && std::abs(E - E_prev) < settings.eps_E && drho < settings.eps_rho) {
      out.converged = true;
      out.energy = E;
      break;
    }
    E_prev = E;
    out.energy = E;
    rho_prev = rho_new;
  }
  out.orbitals = phi;
  out.orbital_energies = fock_eigs;
  out.density = Field(grid_1d, 2.0 * phi.cwiseAbs2().rowwise().sum());
  return out;
}

} // namespace drdmft
