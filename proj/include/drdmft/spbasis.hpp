#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "drdmft/grid.hpp"
#include "drdmft/model.hpp"

namespace drdmft {

/// Eigenstates of the dressed one-body operator on a grid, used both as the
/// expansion basis of the self-consistent solvers and as a natural-orbital
/// container. Orbitals are orthonormal under the grid quadrature, ordered by
/// eigenvalue (node count of the x profile breaks exact ties), signs fixed.
struct OrbitalSet {
  UniformGrid grid;
  Eigen::MatrixXd orbitals; // n_grid x M
  Eigen::VectorXd eigenvalues;
  int n_gs = 0; // occupied in the closed-shell reference, N/2
  int n_es = 0; // extra states, M - N/2

  int size() const { return static_cast<int>(orbitals.cols()); }
};

struct IpOptions {
  double resid_tol = 1e-8;
  int max_iter = 500;
  int chebyshev_degree = 30;
  std::size_t dense_threshold = 2600; // grid sizes up to this solve densely
};

/// Lowest M eigenpairs of h(z) = -Laplacian/2 + v'(z).
OrbitalSet ip_solve(const ModelSpec& model, const UniformGrid& grid, int n_orbitals,
                    const IpOptions& opts = {});

/// Sign changes of the electronic (x) profile of an orbital, counted above a
/// relative amplitude floor.
int node_count_x(const UniformGrid& grid, const Eigen::VectorXd& orbital, double floor = 1e-6);

/// One- and two-body matrix elements over an orbital set. The Coulomb part is
/// kept in separable pair-density form: the kernel only acts on x, so
/// (pq|rs) = sum_x rho_pq(x) pot_rs(x) with pot = (hx^2 w) rho. Dressed
/// contributions are rank-one in the x and q moment matrices.
struct IntegralTable {
  int M = 0;
  UniformGrid grid;
  ModelSpec model;
  std::uint64_t key = 0;
  bool coulomb_enabled = true;

  Eigen::MatrixXd h;     // <p| h^(1) |q>
  Eigen::MatrixXd x_mom; // <p| x |q>
  std::vector<Eigen::MatrixXd> q_mom; // per mode: <p| q_a |q>
  std::vector<Eigen::MatrixXd> q_osc; // per mode: <p| -d2/dq2/2 + w^2 q^2/2 |q>

  Eigen::MatrixXd pair_rho; // n_x x npair, packed p <= q
  Eigen::MatrixXd pair_pot; // n_x x npair, Coulomb potential of each pair

  int npair() const { return M * (M + 1) / 2; }
  static int pair_index(int p, int q, int M);

  /// Soft-Coulomb two-electron element in chemist notation (pq|rs).
  double coulomb(int p, int q, int r, int s) const;
  /// Full dressed two-body element (pq|rs) for w'.
  double dressed(int p, int q, int r, int s) const;
};

IntegralTable build_integrals(const OrbitalSet& basis, const ModelSpec& model);

} // namespace drdmft
