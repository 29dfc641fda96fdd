#include "drdmft/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drdmft {

NaturalOrbitalsOnGrid on_grid(const OrbitalSet& basis, const OneRDM& rdm) {
  NaturalOrbitalsOnGrid nos;
  nos.grid = basis.grid;
  nos.orbitals = basis.orbitals * rdm.coeff;
  nos.occupations = rdm.occ;
  // Report in natural order: occupations descending, deterministic ties.
  std::vector<int> order(static_cast<std::size_t>(rdm.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rdm.occ[a] > rdm.occ[b]; });
  NaturalOrbitalsOnGrid sorted = nos;
  for (int i = 0; i < rdm.size(); ++i) {
    sorted.occupations[i] = nos.occupations[order[static_cast<std::size_t>(i)]];
    sorted.orbitals.col(i) = nos.orbitals.col(order[static_cast<std::size_t>(i)]);
    fix_sign(sorted.orbitals.col(i));
  }
  return sorted;
}

NaturalOrbitalsOnGrid on_grid(const ExactRdm& rdm) {
  NaturalOrbitalsOnGrid nos;
  nos.grid = rdm.grid;
  nos.orbitals = rdm.orbitals;
  nos.occupations = rdm.occupations;
  return nos;
}

DensityBundle densities_from_rdm(const NaturalOrbitalsOnGrid& nos) {
  DensityBundle b;
  b.rho_xq = Field(nos.grid);
  for (int i = 0; i < nos.occupations.size(); ++i) {
    Field orb_density(nos.grid, nos.orbitals.col(i).cwiseAbs2());
    b.orbital_rho_x.push_back(axis_marginal(orb_density, 0));
    if (nos.grid.dim() >= 2) b.orbital_rho_q.push_back(axis_marginal(orb_density, 1));
    if (nos.occupations[i] != 0.0) b.rho_xq.values += nos.occupations[i] * orb_density.values;
  }
  b.rho_x = axis_marginal(b.rho_xq, 0);
  if (nos.grid.dim() >= 2) b.rho_q = axis_marginal(b.rho_xq, 1);
  return b;
}

double photon_mode_energy(const NaturalOrbitalsOnGrid& nos, double omega, int mode_index) {
  const int axis = 1 + mode_index;
  if (axis >= nos.grid.dim()) {
    throw ArityMismatch("photon_mode_energy: grid has no axis for the requested mode");
  }
  const Axis& ax = nos.grid.axis(axis);
  Eigen::VectorXd q2(static_cast<Eigen::Index>(nos.grid.size()));
  {
    const std::size_t s = nos.grid.stride(axis);
    const std::size_t n = static_cast<std::size_t>(ax.n);
    for (std::size_t p = 0; p < nos.grid.size(); ++p) {
      const double q = ax.point(static_cast<int>((p / s) % n));
      q2[static_cast<Eigen::Index>(p)] = q * q;
    }
  }
  const double cv = nos.grid.cell_volume();
  const int axes[1] = {axis};
  double e = 0.0;
  Eigen::VectorXd tmp(static_cast<Eigen::Index>(nos.grid.size()));
  for (int i = 0; i < nos.occupations.size(); ++i) {
    if (nos.occupations[i] == 0.0) continue;
    tmp = (0.5 * omega * omega) * q2.cwiseProduct(nos.orbitals.col(i));
    add_scaled_laplacian(nos.grid, nos.orbitals.col(i).data(), tmp.data(), axes, -0.5);
    e += nos.occupations[i] * cv * nos.orbitals.col(i).dot(tmp);
  }
  return e;
}

double mode_occupation(const NaturalOrbitalsOnGrid& nos, double omega, int n_electrons,
                       int mode_index) {
  return photon_mode_energy(nos, omega, mode_index) / omega - 0.5 * n_electrons;
}

NaturalOrbitalReport natural_orbital_report(const NaturalOrbitalsOnGrid& nos) {
  NaturalOrbitalReport rep;
  const int K = static_cast<int>(nos.occupations.size());
  const double cv = nos.grid.cell_volume();
  Eigen::MatrixXd S = cv * nos.orbitals.transpose() * nos.orbitals;
  for (int i = 0; i < K; ++i) {
    NaturalOrbitalRow row;
    row.occupation = nos.occupations[i];
    row.nodes_x = node_count_x(nos.grid, nos.orbitals.col(i));
    double defect = std::abs(S(i, i) - 1.0);
    for (int j = 0; j < K; ++j) {
      if (j != i) defect = std::max(defect, std::abs(S(i, j)));
    }
    row.orthonormality_defect = defect;
    rep.rows.push_back(row);
    rep.occupation_sum += row.occupation;
  }
  return rep;
}

DensityDifference density_difference(const Field& a, const Field& b) {
  if (!a.grid.same_as(b.grid)) throw GridMismatch("density_difference: grids differ");
  DensityDifference d;
  d.delta = Field(a.grid, a.values - b.values);
  d.max_abs = d.delta.values.cwiseAbs().maxCoeff();
  return d;
}

} // namespace drdmft
