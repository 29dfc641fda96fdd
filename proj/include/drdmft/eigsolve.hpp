#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace drdmft {

/// Matrix-free real symmetric operator.
struct SymOp {
  std::size_t n = 0;
  std::function<void(const double*, double*)> apply;

  void operator()(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    apply(in.data(), out.data());
  }
};

struct EigResult {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXd vectors; // one column per state, unit 2-norm
  bool converged = false;
  double max_residual = 0.0;
  int iterations = 0;
};

/// Builds the dense matrix column by column and diagonalizes it. Intended for
/// small grids (1D axes, coarse 2D product grids).
EigResult lowest_eigenpairs_dense(const SymOp& op, int n_states);

struct LanczosOptions {
  int n_states = 1;
  double resid_tol = 1e-6;
  double eps_energy = 1e-9; // stagnation of wanted Ritz values per restart
  int max_basis = 120;      // Krylov vectors kept in memory
  int max_restarts = 400;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Optional projector onto an invariant subspace (applied to the start
  /// vector and after every operator application).
  std::function<void(double*)> project;
};

/// Thick-restart Lanczos with full reorthogonalization for the lowest
/// eigenpairs. Throws NoConvergence when restarts are exhausted.
EigResult lanczos_lowest(const SymOp& op, const LanczosOptions& opts);

struct ChefsiOptions {
  int n_states = 1;
  int block_extra = 12; // block size = n_states + block_extra
  int degree = 30;
  double resid_tol = 1e-8;
  int max_iter = 400;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Chebyshev-filtered subspace iteration for the lowest eigenpairs of a wide
/// spectrum operator. `guess` (may be empty) seeds the subspace; random
/// columns pad it to the block size. Throws NoConvergence on stagnation.
EigResult chefsi_lowest(const SymOp& op, const ChefsiOptions& opts,
                        const Eigen::MatrixXd& guess = Eigen::MatrixXd());

/// Upper spectral bound estimate from a short Lanczos run (safeguarded).
double spectral_upper_bound(const SymOp& op, int steps = 30, std::uint64_t seed = 7777);

} // namespace drdmft
