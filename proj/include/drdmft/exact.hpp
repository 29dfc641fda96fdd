#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "drdmft/grid.hpp"
#include "drdmft/model.hpp"

namespace drdmft {

/// Symmetric two-particle amplitude on the product of two copies of a
/// single-particle grid (x for bare electronic runs, (x,q) for dressed ones).
/// Stored flat with the first particle's index slowest; unit norm under the
/// product-grid quadrature.
struct TwoBodyState {
  UniformGrid sp_grid;
  Eigen::VectorXd amplitude;
  double energy = 0.0;

  std::size_t sp_dim() const { return sp_grid.size(); }
};

struct Spectrum {
  std::vector<double> energies; // non-decreasing
  std::vector<TwoBodyState> states;
};

struct ExactOptions {
  int n_states = 1;
  double resid_tol = 1e-6;
  double eps_energy = 1e-9;
  std::size_t memory_budget = 2ull << 30; // bytes for the Lanczos basis
  int max_restarts = 400;
};

/// Lowest eigenpairs of the two-particle Hamiltonian in the exchange-symmetric
/// (spatial singlet) sector, via thick-restart Lanczos with explicit
/// symmetrization of every Krylov vector. Requires model.n_electrons == 2.
Spectrum exact_ground_state(const ModelSpec& model, const UniformGrid& sp_grid,
                            const ExactOptions& opts = {});

/// E1 - E0 of the bare two-electron model within the symmetric sector.
double resonance_frequency(const ModelSpec& model, const UniformGrid& sp_grid_1d,
                           const ExactOptions& opts = {});

struct BondScanPoint {
  double d = 0.0;
  double energy = 0.0; // electronic ground state plus nuclear repulsion
};

struct BondScanResult {
  std::vector<BondScanPoint> points;
  double d_min = 0.0; // parabola through the three lowest points
};

/// Ground-state energy of the H2-family model per bond parameter d.
BondScanResult bond_scan(const ModelSpec& model_template, const UniformGrid& sp_grid_1d,
                         const std::vector<double>& d_values, const ExactOptions& opts = {});

/// Spectral form of the dressed one-body reduced density matrix of a
/// symmetric two-particle state: occupations (descending) and natural
/// orbitals on the single-particle grid. Occupations sum to 2.
struct ExactRdm {
  UniformGrid grid;
  Eigen::VectorXd occupations;
  Eigen::MatrixXd orbitals; // n_grid x n_kept, grid-orthonormal
};

ExactRdm dressed_1rdm(const TwoBodyState& state, int n_keep = -1);

struct StateDensities {
  Field rho_z; // single-particle density on the sp grid, integrates to 2
  Field rho_x; // marginal over all but the x axis
  Field rho_q; // marginal over x (empty for 1D sp grids)
};

StateDensities densities(const TwoBodyState& state);

} // namespace drdmft
