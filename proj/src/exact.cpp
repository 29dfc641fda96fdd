#include "drdmft/exact.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>

#include "drdmft/eigsolve.hpp"

namespace drdmft {

namespace {

UniformGrid product_grid(const UniformGrid& sp) {
  std::vector<Axis> axes;
  for (int rep = 0; rep < 2; ++rep) {
    for (int a = 0; a < sp.dim(); ++a) axes.push_back(sp.axis(a));
  }
  return UniformGrid(std::move(axes));
}

// v'(z1) + v'(z2) + w'(z1,z2) on the product grid, flat with z1 slowest.
Eigen::VectorXd total_potential(const ModelSpec& model, const UniformGrid& sp) {
  const std::size_t n = sp.size();
  const int k = sp.dim();
  OneBodyOperator h1(model, sp);
  const Eigen::VectorXd& vp = h1.potential().values;

  Eigen::MatrixXd coords(static_cast<Eigen::Index>(n), k);
  std::vector<double> z(static_cast<std::size_t>(k));
  for (std::size_t p = 0; p < n; ++p) {
    grid_point(sp, p, z);
    for (int a = 0; a < k; ++a) coords(static_cast<Eigen::Index>(p), a) = z[static_cast<std::size_t>(a)];
  }

  Eigen::VectorXd vtot(static_cast<Eigen::Index>(n * n));
  std::vector<double> qvi(static_cast<std::size_t>(k - 1)), qvj(static_cast<std::size_t>(k - 1));
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = coords(static_cast<Eigen::Index>(i), 0);
    for (int a = 1; a < k; ++a) qvi[static_cast<std::size_t>(a - 1)] = coords(static_cast<Eigen::Index>(i), a);
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = coords(static_cast<Eigen::Index>(j), 0);
      for (int a = 1; a < k; ++a) qvj[static_cast<std::size_t>(a - 1)] = coords(static_cast<Eigen::Index>(j), a);
      const double w = dressed_interaction(xi, qvi, xj, qvj, model);
      vtot[static_cast<Eigen::Index>(i * n + j)] =
          vp[static_cast<Eigen::Index>(i)] + vp[static_cast<Eigen::Index>(j)] + w;
    }
  }
  return vtot;
}

void symmetrize_pair(double* psi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = psi[i * n + j];
      const double b = psi[j * n + i];
      const double s = 0.5 * (a + b);
      psi[i * n + j] = s;
      psi[j * n + i] = s;
    }
  }
}

} // namespace

Spectrum exact_ground_state(const ModelSpec& model, const UniformGrid& sp_grid, const ExactOptions& opts) {
  if (model.n_electrons != 2) {
    throw ArityMismatch(fmt::format("exact solver handles N=2 only, got N={}", model.n_electrons));
  }
  if (sp_grid.dim() != 1 + model.n_modes()) {
    throw ArityMismatch(fmt::format("single-particle grid needs 1+{} axes, got {}", model.n_modes(),
                                    sp_grid.dim()));
  }
  const std::size_t n_sp = sp_grid.size();
  const std::size_t dim = n_sp * n_sp;
  const UniformGrid pg = product_grid(sp_grid);
  const Eigen::VectorXd vtot = total_potential(model, sp_grid);

  SymOp op;
  op.n = dim;
  op.apply = [&](const double* in, double* out) {
    const double* v = vtot.data();
    for (std::size_t i = 0; i < dim; ++i) out[i] = v[i] * in[i];
    add_scaled_laplacian(pg, in, out, {}, -0.5);
  };

  LanczosOptions lopts;
  lopts.n_states = opts.n_states;
  lopts.resid_tol = opts.resid_tol;
  lopts.eps_energy = opts.eps_energy;
  lopts.max_restarts = opts.max_restarts;
  const std::size_t vec_bytes = dim * sizeof(double);
  const int m_budget = static_cast<int>(std::min<std::size_t>(140, opts.memory_budget / vec_bytes));
  if (m_budget < opts.n_states + 8) {
    throw MemoryBudgetExceeded(
        fmt::format("two-particle state of {} points needs {} MiB per Lanczos vector; budget allows only "
                    "{} basis vectors (need at least {})",
                    dim, vec_bytes >> 20, m_budget, opts.n_states + 8));
  }
  lopts.max_basis = std::max(opts.n_states + 8, m_budget);
  lopts.project = [n_sp](double* psi) { symmetrize_pair(psi, n_sp); };

  EigResult eig = lanczos_lowest(op, lopts);

  Spectrum spec;
  const double cv_pair = pg.cell_volume();
  for (int s = 0; s < opts.n_states; ++s) {
    TwoBodyState st;
    st.sp_grid = sp_grid;
    st.amplitude = eig.vectors.col(s) / std::sqrt(cv_pair);
    symmetrize_pair(st.amplitude.data(), n_sp);
    st.energy = eig.values[s];
    fix_sign(st.amplitude);
    spec.energies.push_back(st.energy);
    spec.states.push_back(std::move(st));
  }
  return spec;
}

double resonance_frequency(const ModelSpec& model, const UniformGrid& sp_grid_1d, const ExactOptions& opts) {
  if (!model.modes.empty()) {
    throw ArityMismatch("resonance_frequency expects the bare electronic model (no modes)");
  }
  ExactOptions o = opts;
  o.n_states = 2;
  Spectrum s = exact_ground_state(model, sp_grid_1d, o);
  return s.energies[1] - s.energies[0];
}

BondScanResult bond_scan(const ModelSpec& model_template, const UniformGrid& sp_grid_1d,
                         const std::vector<double>& d_values, const ExactOptions& opts) {
  if (model_template.potential.kind != PotentialSpec::Kind::SoftHydrogenMolecule) {
    throw UnknownKind("bond_scan needs the H2 potential family");
  }
  BondScanResult result;
  ExactOptions o = opts;
  o.n_states = 1;
  for (double d : d_values) {
    ModelSpec m = model_template;
    m.potential.d = d;
    Spectrum s = exact_ground_state(m, sp_grid_1d, o);
    result.points.push_back({d, s.energies[0] + nuclear_repulsion(m.potential)});
  }
  // Parabola through the minimum sample and its neighbours.
  std::size_t imin = 0;
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (result.points[i].energy < result.points[imin].energy) imin = i;
  }
  if (result.points.size() < 3) {
    result.d_min = result.points.empty() ? 0.0 : result.points[imin].d;
    return result;
  }
  std::size_t i0 = imin == 0 ? 0 : (imin + 1 == result.points.size() ? imin - 2 : imin - 1);
  const auto& p0 = result.points[i0];
  const auto& p1 = result.points[i0 + 1];
  const auto& p2 = result.points[i0 + 2];
  const double d01 = (p1.energy - p0.energy) / (p1.d - p0.d);
  const double d12 = (p2.energy - p1.energy) / (p2.d - p1.d);
  const double curv = (d12 - d01) / (p2.d - p0.d);
  if (curv <= 0.0) {
    result.d_min = result.points[imin].d;
  } else {
    result.d_min = 0.5 * (p0.d + p1.d) - d01 / (2.0 * curv);
  }
  return result;
}

ExactRdm dressed_1rdm(const TwoBodyState& state, int n_keep) {
  const std::size_t n = state.sp_dim();
  const double cv = state.sp_grid.cell_volume();
  Eigen::Map<const Eigen::MatrixXd> psi(state.amplitude.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
  // The amplitude is stored z1-slowest (row-major); the symmetric state makes
  // the transpose question moot.
  Eigen::MatrixXd b = cv * psi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  const Eigen::VectorXd& sv = es.eigenvalues();

  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index i = 0; i < sv.size(); ++i) order.emplace_back(2.0 * sv[i] * sv[i], i);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b2) { return a.first > b2.first; });

  int keep = n_keep > 0 ? std::min<int>(n_keep, static_cast<int>(n)) : 0;
  if (n_keep <= 0) {
    for (const auto& [occ, idx] : order) {
      if (occ > 1e-12) ++keep;
    }
    keep = std::max(keep, 1);
  }

  ExactRdm rdm;
  rdm.grid = state.sp_grid;
  rdm.occupations.resize(keep);
  rdm.orbitals.resize(static_cast<Eigen::Index>(n), keep);
  const double inv_sqrt_cv = 1.0 / std::sqrt(cv);
  for (int k = 0; k < keep; ++k) {
    rdm.occupations[k] = order[static_cast<std::size_t>(k)].first;
    rdm.orbitals.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)].second) * inv_sqrt_cv;
    fix_sign(rdm.orbitals.col(k));
  }
  return rdm;
}

StateDensities densities(const TwoBodyState& state) {
  const std::size_t n = state.sp_dim();
  const double cv = state.sp_grid.cell_volume();
  Eigen::Map<const Eigen::MatrixXd> psi(state.amplitude.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
  StateDensities out;
  out.rho_z = Field(state.sp_grid);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    out.rho_z.values[i] = 2.0 * cv * psi.row(i).squaredNorm();
  }
  out.rho_x = axis_marginal(out.rho_z, 0);
  if (state.sp_grid.dim() >= 2) out.rho_q = axis_marginal(out.rho_z, 1);
  return out;
}

} // namespace drdmft
