#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drdmft/model.hpp"

using namespace drdmft;

namespace {

ModelSpec dressed_helium(double omega, double lambda) {
  ModelSpec m;
  m.potential = PotentialSpec::soft_helium();
  m.n_electrons = 2;
  m.modes = {{omega, lambda}};
  return m;
}

} // namespace

TEST_CASE("effective coupling and inverse") {
  CHECK(effective_coupling({0.5535, 0.0}).g == 0.0);

  Coupling c = effective_coupling({0.5535, 0.1});
  CHECK(c.g == doctest::Approx(0.052607).epsilon(1e-4));
  CHECK(c.g_over_omega == doctest::Approx(0.09504).epsilon(1e-4));

  CHECK(lambda_for(1.0, 0.5535) == doctest::Approx(1.05215).epsilon(1e-4));

  // round trip to 1e-12
  for (double lam : {0.05, 0.3, 1.2}) {
    PhotonMode mode{0.777, lam};
    Coupling cc = effective_coupling(mode);
    CHECK(std::abs(lambda_for(cc.g_over_omega, mode.omega) - lam) < 1e-12);
  }
}

TEST_CASE("bare potentials") {
  CHECK(bare_potential(0.0, PotentialSpec::soft_helium()) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(bare_potential(0.0, PotentialSpec::soft_hydrogen_molecule(1.628)) ==
        doctest::Approx(-2.0 / std::sqrt(1.628 * 1.628 + 1.0)).epsilon(1e-13));
  CHECK(bare_potential(0.0, PotentialSpec::soft_beryllium(0.5)) == doctest::Approx(-8.0).epsilon(1e-14));
  CHECK(bare_potential(2.0, PotentialSpec::harmonic(3.0)) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("custom potential interpolates") {
  PotentialSpec p = PotentialSpec::custom({-1.0, 0.0, 1.0}, {2.0, 0.0, 2.0});
  CHECK(bare_potential(0.5, p) == doctest::Approx(1.0));
  CHECK(bare_potential(5.0, p) == doctest::Approx(2.0)); // clamped
}

TEST_CASE("soft coulomb") {
  CHECK(soft_coulomb(0.3, 0.3, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(soft_coulomb(0.0, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(soft_coulomb(0.0, 4000.0, 1.0) < 3e-4);
}

TEST_CASE("dressed potential") {
  ModelSpec m = dressed_helium(0.5535, 0.1);
  CHECK(dressed_potential(1.0, 1.0, m) == doctest::Approx(-1.295171).epsilon(1e-6));

  // lambda = 0 separates exactly
  ModelSpec m0 = dressed_helium(0.5535, 0.0);
  for (double x : {-1.5, 0.2, 2.0}) {
    for (double q : {-2.0, 0.5}) {
      CHECK(dressed_potential(x, q, m0) ==
            doctest::Approx(bare_potential(x, m0.potential) + 0.5 * 0.5535 * 0.5535 * q * q)
                .epsilon(1e-14));
    }
  }

  // all coupling terms vanish at x = 0
  CHECK(dressed_potential(0.0, 1.3, m) ==
        doctest::Approx(bare_potential(0.0, m.potential) + 0.5 * 0.5535 * 0.5535 * 1.3 * 1.3)
            .epsilon(1e-14));

  CHECK_THROWS_AS(dressed_potential(0.0, std::span<const double>(), m), ArityMismatch);
}

TEST_CASE("dressed interaction") {
  ModelSpec m = dressed_helium(0.5535, 0.1);
  ModelSpec m0 = dressed_helium(0.5535, 0.0);
  CHECK(dressed_interaction(0.4, 0.8, -0.3, 1.1, m0) ==
        doctest::Approx(soft_coulomb(0.4, -0.3, 1.0)).epsilon(1e-14));

  CHECK(dressed_interaction(1.0, 0.0, 1.0, 0.0, m) == doctest::Approx(1.01).epsilon(1e-12));

  // kernel exchange symmetry z <-> z'
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    const double x = u(rng), q = u(rng), xp = u(rng), qp = u(rng);
    CHECK(dressed_interaction(x, q, xp, qp, m) ==
          doctest::Approx(dressed_interaction(xp, qp, x, q, m)).epsilon(1e-14));
  }

  // interaction switch drops only the Coulomb part
  ModelSpec mip = m;
  mip.interaction_enabled = false;
  const double full = dressed_interaction(0.7, -0.4, -1.1, 0.9, m);
  const double nocoul = dressed_interaction(0.7, -0.4, -1.1, 0.9, mip);
  CHECK(full - nocoul == doctest::Approx(soft_coulomb(0.7, -1.1, 1.0)).epsilon(1e-13));
}

TEST_CASE("joint parity of dressed quantities") {
  ModelSpec m = dressed_helium(0.7, 0.35);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    const double x = u(rng), q = u(rng), xp = u(rng), qp = u(rng);
    CHECK(dressed_potential(x, q, m) == doctest::Approx(dressed_potential(-x, -q, m)).epsilon(1e-14));
    CHECK(dressed_interaction(x, q, xp, qp, m) ==
          doctest::Approx(dressed_interaction(-x, -q, -xp, -qp, m)).epsilon(1e-14));
  }
}

TEST_CASE("nuclear repulsion only for the molecule") {
  CHECK(nuclear_repulsion(PotentialSpec::soft_helium()) == 0.0);
  const double d = 1.628;
  CHECK(nuclear_repulsion(PotentialSpec::soft_hydrogen_molecule(d)) ==
        doctest::Approx(1.0 / std::sqrt(4.0 * d * d + 1.0)).epsilon(1e-13));
}

TEST_CASE("one-body operator") {
  // pure oscillator: Rayleigh quotient of the analytic ground state
  ModelSpec osc;
  osc.potential = PotentialSpec::harmonic(1.0);
  osc.n_electrons = 2;
  UniformGrid g = make_grid({{16.0, 0.1}});
  OneBodyOperator h(osc, g);
  Field f(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    f.values[i] = std::exp(-0.5 * x * x);
  }
  f.values /= field_norm(f);
  Field hf = h.apply(f);
  CHECK(inner_product(f, hf) == doctest::Approx(0.5).epsilon(1e-4));

  // hermiticity on a dressed 2D grid
  ModelSpec m = dressed_helium(0.5535, 0.2);
  UniformGrid g2 = make_grid({{4.0, 0.5}, {4.0, 0.5}});
  OneBodyOperator h2(m, g2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  Field a(g2), b(g2);
  for (std::size_t i = 0; i < g2.size(); ++i) {
    a.values[static_cast<Eigen::Index>(i)] = dist(rng);
    b.values[static_cast<Eigen::Index>(i)] = dist(rng);
  }
  const double lhs = inner_product(a, h2.apply(b));
  const double rhs = inner_product(h2.apply(a), b);
  CHECK(std::abs(lhs - rhs) < 1e-10 * field_norm(a) * field_norm(b));

  CHECK_THROWS_AS(OneBodyOperator(m, g), ArityMismatch);
}

TEST_CASE("model hash is stable and sensitive") {
  ModelSpec m = dressed_helium(0.5535, 0.1);
  UniformGrid g = make_grid({{4.0, 0.5}, {4.0, 0.5}});
  const std::uint64_t h1 = model_hash(m, g);
  CHECK(h1 == model_hash(m, g));
  ModelSpec m2 = m;
  m2.modes[0].lambda = 0.2;
  CHECK(h1 != model_hash(m2, g));
}
