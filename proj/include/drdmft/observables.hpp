#pragma once

#include <Eigen/Core>
#include <vector>

#include "drdmft/exact.hpp"
#include "drdmft/solver.hpp"

namespace drdmft {

/// Natural orbitals reconstructed on a grid with their occupations. Common
/// currency between the basis-set solvers and the exact RDM extraction.
struct NaturalOrbitalsOnGrid {
  UniformGrid grid;
  Eigen::MatrixXd orbitals; // n_grid x K, grid-orthonormal
  Eigen::VectorXd occupations;
};

NaturalOrbitalsOnGrid on_grid(const OrbitalSet& basis, const OneRDM& rdm);
NaturalOrbitalsOnGrid on_grid(const ExactRdm& rdm);

struct DensityBundle {
  Field rho_xq; // density on the single-particle grid (name kept for the
                // one-mode case; any number of q axes is carried along)
  Field rho_x;
  Field rho_q;                      // empty for purely electronic grids
  std::vector<Field> orbital_rho_x; // per natural orbital
  std::vector<Field> orbital_rho_q;
};

DensityBundle densities_from_rdm(const NaturalOrbitalsOnGrid& nos);

/// Occupation-weighted expectation of the per-particle q oscillator
/// -d^2/dq^2/2 + omega^2 q^2/2 on the given mode axis.
double photon_mode_energy(const NaturalOrbitalsOnGrid& nos, double omega, int mode_index = 0);

/// N_ph = E_ph/omega - N/2.
double mode_occupation(const NaturalOrbitalsOnGrid& nos, double omega, int n_electrons,
                       int mode_index = 0);

struct NaturalOrbitalRow {
  double occupation = 0.0;
  int nodes_x = 0;
  double orthonormality_defect = 0.0; // max |<i|j> - delta| against the others
};

struct NaturalOrbitalReport {
  std::vector<NaturalOrbitalRow> rows; // occupations descending
  double occupation_sum = 0.0;
};

NaturalOrbitalReport natural_orbital_report(const NaturalOrbitalsOnGrid& nos);

struct DensityDifference {
  Field delta; // pointwise a - b
  double max_abs = 0.0;
};

DensityDifference density_difference(const Field& a, const Field& b);

} // namespace drdmft
