#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "drdmft/grid.hpp"

using namespace drdmft;

TEST_CASE("axis construction") {
  UniformGrid g3 = make_grid({{2.0, 1.0}});
  CHECK(g3.axis(0).n == 3);
  CHECK(g3.axis(0).point(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(g3.axis(0).point(1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g3.axis(0).point(2) == doctest::Approx(1.0).epsilon(1e-14));

  UniformGrid g201 = make_grid({{20.0, 0.1}});
  CHECK(g201.axis(0).n == 201);

  UniformGrid g115 = make_grid({{16.0, 0.14}});
  CHECK(g115.axis(0).n == 115);
  CHECK(g115.axis(0).effective_length() == doctest::Approx(15.96).epsilon(1e-12));
}

TEST_CASE("axis symmetry about zero") {
  UniformGrid g = make_grid({{16.0, 0.14}});
  const Axis& ax = g.axis(0);
  for (int i = 0; i < ax.n; ++i) {
    CHECK(std::abs(ax.point(i) + ax.point(ax.n - 1 - i)) < 1e-13);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_grid({{1.0, 1.0}}), TooSmall);          // 2 points
  CHECK_THROWS_AS(make_grid({{-2.0, 0.1}}), NonCommensurate);  // bad length
  CHECK_THROWS_AS(make_grid({{2.0, -0.1}}), NonCommensurate);  // bad spacing
}

TEST_CASE("laplacian exact for quadratics") {
  UniformGrid g = make_grid({{10.0, 0.5}});
  Field f(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    f.values[i] = x * x;
  }
  Field lap = apply_laplacian(f);
  for (int i = 2; i < g.axis(0).n - 2; ++i) {
    CHECK(lap.values[i] == doctest::Approx(2.0).epsilon(1e-11));
  }

  Field zero(g);
  Field lz = apply_laplacian(zero);
  CHECK(lz.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian truncation error on sin") {
  UniformGrid g = make_grid({{20.0, 0.1}});
  Field f(g);
  for (int i = 0; i < g.axis(0).n; ++i) f.values[i] = std::sin(g.axis(0).point(i));
  Field lap = apply_laplacian(f);
  double max_err = 0.0;
  for (int i = 2; i < g.axis(0).n - 2; ++i) {
    max_err = std::max(max_err, std::abs(lap.values[i] + std::sin(g.axis(0).point(i))));
  }
  CHECK(max_err <= 1e-4);
}

TEST_CASE("laplacian needs 7 points per axis") {
  UniformGrid g = make_grid({{4.0, 1.0}}); // 5 points
  Field f(g);
  CHECK_THROWS_AS(apply_laplacian(f), TooSmall);
}

TEST_CASE("quadrature") {
  UniformGrid g3 = make_grid({{2.0, 1.0}});
  Field ones(g3, Eigen::VectorXd::Ones(3));
  CHECK(integrate(ones) == doctest::Approx(3.0).epsilon(1e-15));

  UniformGrid g = make_grid({{20.0, 0.1}});
  Field gauss(g);
  for (int i = 0; i < g.axis(0).n; ++i) {
    const double x = g.axis(0).point(i);
    gauss.values[i] = std::exp(-x * x);
  }
  CHECK(std::abs(integrate(gauss) - std::sqrt(std::numbers::pi)) < 1e-10);

  Field normalized = gauss;
  normalized.values /= field_norm(gauss);
  CHECK(inner_product(normalized, normalized) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature refinement converges") {
  auto value_at = [](double h) {
    UniformGrid g = make_grid({{20.0, h}});
    Field f(g);
    for (int i = 0; i < g.axis(0).n; ++i) {
      const double x = g.axis(0).point(i);
      f.values[i] = std::exp(-0.3 * x * x) * std::cos(x);
    }
    return integrate(f);
  };
  const double ref = value_at(0.005);
  const double e1 = std::abs(value_at(0.4) - ref);
  const double e2 = std::abs(value_at(0.2) - ref);
  CHECK(e2 <= e1); // at least first order
}

TEST_CASE("inner product and grid mismatch") {
  UniformGrid a = make_grid({{2.0, 1.0}});
  UniformGrid b = make_grid({{4.0, 1.0}});
  Field fa(a), fb(b);
  CHECK_THROWS_AS(inner_product(fa, fb), GridMismatch);

  Field g1(a, Eigen::VectorXd::LinSpaced(3, 1.0, 3.0));
  Field g2(a, Eigen::VectorXd::LinSpaced(3, -1.0, 1.0));
  CHECK(inner_product(g1, g2) == doctest::Approx(inner_product(g2, g1)).epsilon(1e-15));
}

TEST_CASE("laplacian symmetry and negative semi-definiteness") {
  UniformGrid g = make_grid({{4.0, 0.25}, {3.0, 0.25}});
  std::mt19937_64 rng(42);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 5; ++trial) {
    Field f(g), h(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      f.values[static_cast<Eigen::Index>(i)] = dist(rng);
      h.values[static_cast<Eigen::Index>(i)] = dist(rng);
    }
    Field lf = apply_laplacian(f);
    Field lh = apply_laplacian(h);
    const double lhs = inner_product(f, lh);
    const double rhs = inner_product(lf, h);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * field_norm(f) * field_norm(h));
    CHECK(inner_product(f, lf) <= 1e-12);
  }
}

TEST_CASE("axis marginal") {
  UniformGrid g = make_grid({{2.0, 1.0}, {2.0, 1.0}});
  Field f(g, Eigen::VectorXd::Ones(9));
  Field mx = axis_marginal(f, 0);
  CHECK(mx.values.size() == 3);
  CHECK(mx.values[0] == doctest::Approx(3.0)); // 3 points * h=1
  CHECK(integrate(mx) == doctest::Approx(integrate(f)).epsilon(1e-14));
}
