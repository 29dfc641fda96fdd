#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "drdmft/spbasis.hpp"

namespace drdmft {

enum class Functional { HartreeFock, Mueller };

/// Spectral form of the dressed 1RDM over an IP basis: natural-orbital
/// coefficients (columns, unitary) and occupations in [0,2] summing to N.
struct OneRDM {
  Eigen::MatrixXd coeff;
  Eigen::VectorXd occ;
  std::uint64_t basis_key = 0;

  int size() const { return static_cast<int>(occ.size()); }
};

struct SCFSettings {
  double eps_E = 1e-9;
  double eps_rho = 1e-8;
  double eps_lambda = 1e-6; // 1e3 * eps_E
  double eps_mu = 1e-8;
  int max_outer = 100;
  int max_orbital = 400;
  int max_occupation = 300;
  double mixing = 1.0;
  double n_floor = 1e-10;

  /// Called after every accepted outer iterate (tests hook invariants here).
  std::function<void(const OneRDM&, double)> iterate_hook;
};

struct EnergyReport {
  double one_body = 0.0;
  double hartree = 0.0;
  double xc = 0.0;
  double total = 0.0;
  std::vector<double> photon_mode_energy; // per mode
  std::vector<double> mode_occupation;    // per mode
  int outer_iterations = 0;
  bool converged_energy = false;
  bool converged_density = false;
  bool converged_lambda = false;
  double lambda_defect = 0.0;
  double mu = 0.0;
  double delta_rho = 0.0;
};

/// Total energy and its decomposition for a given 1RDM. HartreeFock uses the
/// same square-root pairing as Mueller; at pinned occupations it reduces to
/// the closed-shell expression.
EnergyReport energy(const OneRDM& rdm, const IntegralTable& table, Functional functional);

struct OccupationGradient {
  Eigen::VectorXd dE_dn;
  Eigen::VectorXd dE_dalpha; // chain rule through n_i = 2 sin^2(alpha_i)
};

OccupationGradient occupation_gradient(const OneRDM& rdm, const IntegralTable& table,
                                       Functional functional, double n_floor = 1e-10);

struct OccupationStats {
  double mu = 0.0;
  int mu_iterations = 0;
  int bfgs_iterations = 0;
  bool converged = false;
  double particle_defect = 0.0;
};

/// Occupation-number minimization at fixed orbitals: bounded quasi-Newton in
/// the angles at fixed mu, with an outer bisection driving sum(n) to N.
OneRDM occupation_minimize(const OneRDM& rdm, const IntegralTable& table, Functional functional,
                           const SCFSettings& settings, OccupationStats* stats = nullptr);

struct OrbitalStats {
  int iterations = 0;
  double lambda_defect = 0.0;
  bool converged = false;
  double energy = 0.0;
};

/// Orbital optimization at fixed occupations by gap-preconditioned unitary
/// rotations built from the anti-Hermitian part of the Lagrange matrix.
/// Accepted steps never raise the energy; exits on the Lambda-hermiticity and
/// energy criteria.
OneRDM orbital_minimize(const OneRDM& rdm, const IntegralTable& table, Functional functional,
                        const SCFSettings& settings, OrbitalStats* stats = nullptr);

/// Max_ij |Lambda_ij - Lambda_ji| of the orbital-stationarity matrix.
double lambda_hermiticity_defect(const OneRDM& rdm, const IntegralTable& table, Functional functional,
                                 double n_floor = 1e-10);

struct SolveResult {
  OneRDM rdm;
  EnergyReport report;
  OrbitalSet basis;
  IntegralTable table;
};

/// Full pipeline: IP basis, integrals, HF, then (for Mueller) alternating
/// occupation/orbital minimization until both the energy and density-change
/// criteria hold. A warm start replaces the HF initialization when provided.
SolveResult solve(const ModelSpec& model, const UniformGrid& grid, int n_orbitals,
                  Functional functional, const SCFSettings& settings = {},
                  const OneRDM* warm_start = nullptr, const IpOptions& ip_opts = {});

struct GridHFResult {
  double energy = 0.0;
  Eigen::MatrixXd orbitals; // n_grid x N/2, grid-orthonormal
  Eigen::VectorXd orbital_energies;
  Field density;
  bool converged = false;
  int iterations = 0;
};

/// Closed-shell Hartree-Fock directly on a 1D electronic grid (reference
/// route for consistency checks against the basis-set solvers).
GridHFResult grid_hartree_fock(const ModelSpec& model, const UniformGrid& grid_1d,
                               const SCFSettings& settings = {});

} // namespace drdmft
