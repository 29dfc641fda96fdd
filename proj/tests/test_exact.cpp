#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drdmft/exact.hpp"

using namespace drdmft;

namespace {

ModelSpec harmonic_pair() {
  ModelSpec m;
  m.potential = PotentialSpec::harmonic(1.0);
  m.n_electrons = 2;
  m.interaction_enabled = false;
  return m;
}

ModelSpec bare_helium() {
  ModelSpec m;
  m.potential = PotentialSpec::soft_helium();
  m.n_electrons = 2;
  return m;
}

} // namespace

TEST_CASE("two uncoupled oscillators") {
  UniformGrid g = make_grid({{14.0, 0.2}});
  Spectrum s = exact_ground_state(harmonic_pair(), g);
  CHECK(s.energies[0] == doctest::Approx(1.0).epsilon(1e-4));

  // state invariants: norm and exchange symmetry
  const TwoBodyState& st = s.states[0];
  const std::size_t n = st.sp_dim();
  const double cv = g.cell_volume() * g.cell_volume();
  CHECK(cv * st.amplitude.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      asym = std::max(asym, std::abs(st.amplitude[static_cast<Eigen::Index>(i * n + j)] -
                                     st.amplitude[static_cast<Eigen::Index>(j * n + i)]));
    }
  }
  CHECK(asym < 1e-14);
}

TEST_CASE("oscillator resonance is the level spacing") {
  UniformGrid g = make_grid({{14.0, 0.2}});
  ModelSpec m = harmonic_pair();
  CHECK(resonance_frequency(m, g) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("dressed separation at zero coupling") {
  ModelSpec bare = bare_helium();
  UniformGrid gx = make_grid({{10.0, 0.25}});
  Spectrum sb = exact_ground_state(bare, gx);

  ModelSpec dressed = bare;
  dressed.modes = {{0.5535, 0.0}};
  UniformGrid gxq = make_grid({{10.0, 0.25}, {10.0, 0.25}});
  Spectrum sd = exact_ground_state(dressed, gxq);

  CHECK(sd.energies[0] == doctest::Approx(sb.energies[0] + 0.5535).epsilon(1e-6));
}

TEST_CASE("variational bound against random symmetric trials") {
  UniformGrid g = make_grid({{8.0, 0.25}});
  ModelSpec m = bare_helium();
  Spectrum s = exact_ground_state(m, g);
  const std::size_t n = g.size();

  // assemble <phi|H|phi> for random symmetric normalized trials
  OneBodyOperator h1(m, g);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  UniformGrid pg = make_grid({{8.0, 0.25}, {8.0, 0.25}});
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXd psi(static_cast<Eigen::Index>(n * n));
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = dist(rng);
    // symmetrize and localize a bit so the trial is not dominated by kinetic noise
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double sdum = 0.5 * (psi[static_cast<Eigen::Index>(i * n + j)] +
                                   psi[static_cast<Eigen::Index>(j * n + i)]);
        psi[static_cast<Eigen::Index>(i * n + j)] = sdum;
        psi[static_cast<Eigen::Index>(j * n + i)] = sdum;
      }
    }
    psi /= psi.norm();
    Eigen::VectorXd hpsi(psi.size());
    // H = h(z1) + h(z2) + w
    Eigen::VectorXd vtot(psi.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = g.axis(0).point(static_cast<int>(i));
      for (std::size_t j = 0; j < n; ++j) {
        const double xj = g.axis(0).point(static_cast<int>(j));
        vtot[static_cast<Eigen::Index>(i * n + j)] = bare_potential(xi, m.potential) +
                                                     bare_potential(xj, m.potential) +
                                                     soft_coulomb(xi, xj, 1.0);
      }
    }
    hpsi = vtot.cwiseProduct(psi);
    add_scaled_laplacian(pg, psi.data(), hpsi.data(), {}, -0.5);
    const double rayleigh = psi.dot(hpsi);
    CHECK(rayleigh >= s.energies[0] - 1e-10);
  }
}

TEST_CASE("dressed 1rdm of a product state") {
  UniformGrid g = make_grid({{10.0, 0.5}});
  // build an explicit product state phi(x1) phi(x2)
  Field phi(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    phi.values[i] = std::exp(-0.5 * x * x);
  }
  phi.values /= field_norm(phi);
  const std::size_t n = g.size();
  TwoBodyState st;
  st.sp_grid = g;
  st.amplitude.resize(static_cast<Eigen::Index>(n * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      st.amplitude[static_cast<Eigen::Index>(i * n + j)] =
          phi.values[static_cast<Eigen::Index>(i)] * phi.values[static_cast<Eigen::Index>(j)];
    }
  }
  ExactRdm rdm = dressed_1rdm(st);
  CHECK(rdm.occupations[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rdm.occupations.sum() == doctest::Approx(2.0).epsilon(1e-10));
  // natural orbital reproduces phi up to sign
  Field no0(g, rdm.orbitals.col(0));
  CHECK(std::abs(std::abs(inner_product(no0, phi)) - 1.0) < 1e-10);
}

TEST_CASE("1rdm trace and density marginals of an interacting state") {
  UniformGrid g = make_grid({{8.0, 0.25}});
  Spectrum s = exact_ground_state(bare_helium(), g);
  ExactRdm rdm = dressed_1rdm(s.states[0]);
  CHECK(rdm.occupations.sum() == doctest::Approx(2.0).epsilon(1e-8));

  StateDensities d = densities(s.states[0]);
  CHECK(integrate(d.rho_x) == doctest::Approx(2.0).epsilon(1e-8));
  // parity of the density for the even potential
  const int nx = g.axis(0).n;
  for (int i = 0; i < nx; ++i) {
    CHECK(std::abs(d.rho_x.values[i] - d.rho_x.values[nx - 1 - i]) < 1e-8);
  }
}

TEST_CASE("dressed densities at zero coupling") {
  ModelSpec dressed = bare_helium();
  const double omega = 0.9;
  dressed.modes = {{omega, 0.0}};
  UniformGrid g = make_grid({{8.0, 0.25}, {8.0, 0.25}});
  Spectrum s = exact_ground_state(dressed, g);
  StateDensities d = densities(s.states[0]);
  CHECK(integrate(d.rho_q) == doctest::Approx(2.0).epsilon(1e-8));
  // q marginal is twice the oscillator ground density
  for (int i = 0; i < g.axis(1).n; ++i) {
    const double q = g.axis(1).point(i);
    const double ref = 2.0 * std::sqrt(omega / M_PI) * std::exp(-omega * q * q);
    CHECK(d.rho_q.values[i] == doctest::Approx(ref).epsilon(5e-3));
  }
}

TEST_CASE("memory budget rejects oversized spaces") {
  UniformGrid g = make_grid({{10.0, 0.1}});
  ExactOptions o;
  o.memory_budget = 1 << 20; // 1 MiB: far below one 101^2-point pair vector set
  CHECK_THROWS_AS(exact_ground_state(bare_helium(), g, o), MemoryBudgetExceeded);
}
