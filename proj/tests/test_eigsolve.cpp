#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "drdmft/eigsolve.hpp"
#include "drdmft/grid.hpp"
#include "drdmft/model.hpp"

using namespace drdmft;

namespace {

// 1D soft-attractive well, wide spectrum, no degeneracies.
SymOp well_operator(const UniformGrid& g, const Field& v) {
  SymOp op;
  op.n = g.size();
  op.apply = [&g, &v](const double* in, double* out) {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = v.values[static_cast<Eigen::Index>(i)] * in[i];
    add_scaled_laplacian(g, in, out, {}, -0.5);
  };
  return op;
}

} // namespace

TEST_CASE("lanczos and chefsi agree with the dense solver") {
  UniformGrid g = make_grid({{30.0, 0.1}});
  Field v(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    v.values[i] = -2.0 / std::sqrt(x * x + 1.0) + 0.03 * x;
  }
  SymOp op = well_operator(g, v);

  EigResult dense = lowest_eigenpairs_dense(op, 5);

  LanczosOptions lo;
  lo.n_states = 5;
  lo.resid_tol = 1e-9;
  lo.max_basis = 80;
  EigResult lz = lanczos_lowest(op, lo);
  CHECK(lz.converged);
  for (int i = 0; i < 5; ++i) CHECK(lz.values[i] == doctest::Approx(dense.values[i]).epsilon(1e-9));

  ChefsiOptions co;
  co.n_states = 5;
  co.resid_tol = 1e-8;
  EigResult cf = chefsi_lowest(op, co);
  CHECK(cf.converged);
  for (int i = 0; i < 5; ++i) CHECK(cf.values[i] == doctest::Approx(dense.values[i]).epsilon(1e-8));

  // eigenvector quality: residual of the lowest pair
  Eigen::VectorXd r(static_cast<Eigen::Index>(op.n));
  op.apply(lz.vectors.col(0).data(), r.data());
  r -= lz.values[0] * lz.vectors.col(0);
  CHECK(r.norm() < 1e-6);
}

TEST_CASE("lanczos respects a projector") {
  // restrict to even-parity functions of a double well
  UniformGrid g = make_grid({{20.0, 0.1}});
  Field v(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    v.values[i] = -1.0 / std::sqrt((x - 1.0) * (x - 1.0) + 1.0) - 1.0 / std::sqrt((x + 1.0) * (x + 1.0) + 1.0);
  }
  SymOp op = well_operator(g, v);
  const int n = g.axis(0).n;

  LanczosOptions lo;
  lo.n_states = 2;
  lo.resid_tol = 1e-9;
  lo.max_basis = 60;
  lo.project = [n](double* f) {
    for (int i = 0; i < n / 2; ++i) {
      const double s = 0.5 * (f[i] + f[n - 1 - i]);
      f[i] = s;
      f[n - 1 - i] = s;
    }
  };
  EigResult even = lanczos_lowest(op, lo);

  EigResult dense = lowest_eigenpairs_dense(op, 4);
  // dense levels alternate even/odd for a symmetric double well
  CHECK(even.values[0] == doctest::Approx(dense.values[0]).epsilon(1e-9));
  CHECK(even.values[1] == doctest::Approx(dense.values[2]).epsilon(1e-9));
}

TEST_CASE("solvers are deterministic") {
  UniformGrid g = make_grid({{12.0, 0.1}});
  Field v(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    v.values[i] = 0.5 * x * x;
  }
  SymOp op = well_operator(g, v);
  LanczosOptions lo;
  lo.n_states = 3;
  lo.max_basis = 50;
  EigResult a = lanczos_lowest(op, lo);
  EigResult b = lanczos_lowest(op, lo);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("memory budget guard") {
  SymOp op;
  op.n = 1000;
  op.apply = [](const double* in, double* out) {
    for (int i = 0; i < 1000; ++i) out[i] = in[i];
  };
  LanczosOptions lo;
  lo.n_states = 4;
  lo.max_basis = 6; // below n_states + 8
  CHECK_THROWS_AS(lanczos_lowest(op, lo), MemoryBudgetExceeded);
}
