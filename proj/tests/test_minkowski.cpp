#include "doctest.h"
#include "support.hpp"

#include "zsim/minkowski.hpp"

using namespace zsim;
using doctest::Approx;

TEST_CASE("mdot basic values") {
  CHECK(mdot({1, 0, 0, 0}, {1, 0, 0, 0}) == 1.0);
  CHECK(mdot({1, 0, 1, 0}, {1, 0, 1, 0}) == 0.0);
  CHECK(mdot({2, 1, 3, -1}, {1, 4, 0, 2}) == 2.0 - 4.0 - 0.0 + 2.0);
}

TEST_CASE("on-shell momentum has unit norm for random V") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const FourVector p = test::on_shell(test::random_velocity(rng, 0.99));
    CHECK(mdot(p, p) == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mdot is symmetric, bilinear and boost invariant") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const FourVector a = test::random_four(rng), b = test::random_four(rng), c = test::random_four(rng);
    const double k = rng.uniform(-3, 3);
    CHECK(mdot(a, b) == mdot(b, a));
    CHECK(mdot(k * a + c, b) == Approx(k * mdot(a, b) + mdot(c, b)).epsilon(1e-13));
    const Tensor4 L = boost_matrix(BoostParams::from_velocity(test::random_velocity(rng)));
    CHECK(std::abs(mdot(L * a, L * b) - mdot(a, b)) < 1e-12 * (1 + a.norm() * b.norm() * 25));
  }
}

TEST_CASE("lower and raise are inverse") {
  const FourVector a(1.5, -2, 3, 0.25);
  CHECK(raise(lower(a)) == a);
  CHECK(lower(a)[1] == 2.0);
  CHECK(metric() * metric() == Tensor4::Identity());
}

TEST_CASE("gamma_of") {
  CHECK(gamma_of(Vec3::Zero()) == 1.0);
  CHECK(gamma_of(Vec3(0.6, 0, 0)) == Approx(1.25).epsilon(1e-15));
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = test::random_velocity(rng, 0.999);
    CHECK(std::abs(gamma_of(v) - 1.0 / std::sqrt(1.0 - v.squaredNorm())) <
          1e-15 * gamma_of(v));
  }
  CHECK_THROWS_AS(gamma_of(Vec3(1.0, 0, 0)), std::domain_error);
  CHECK_THROWS_AS(gamma_of(Vec3(0.8, 0.8, 0)), std::domain_error);
  CHECK_THROWS_AS(BoostParams::from_velocity(Vec3(0, 0, -1.2)), std::domain_error);
}

TEST_CASE("boost_coords") {
  SUBCASE("identity boost") {
    const auto e = boost_coords(Vec3(1, 2, 3), 0.7, BoostParams::from_velocity(Vec3::Zero()));
    CHECK(e.t == 0.7);
    CHECK(e.x == Vec3(1, 2, 3));
  }
  SUBCASE("spin-centre worldline") {
    const auto p = BoostParams::from_velocity(Vec3(0.3, -0.2, 0.1));
    const auto e = boost_coords(Vec3::Zero(), 2.0, p);
    CHECK(e.t == Approx(p.gamma * 2.0));
    CHECK(test::max_abs(e.x - p.gamma * 2.0 * p.velocity) < 1e-15);
  }
  SUBCASE("hand-evaluated x-boost") {
    // gamma = 1.25, gamma^2/(1+gamma) (V.r) = 1.5625/2.25 * 0.6 * 0.6 = 0.25,
    // so x = r + 0.25 = 1.25 (not 1.45): the same as Lambda^1_1 r = gamma r.
    const auto e = boost_coords(Vec3(1, 0, 0), 0.0, BoostParams::from_velocity(Vec3(0.6, 0, 0)));
    CHECK(e.t == Approx(0.75).epsilon(1e-15));
    CHECK(e.x[0] == Approx(1.25).epsilon(1e-15));
    CHECK(e.x[1] == 0.0);
  }
  SUBCASE("agrees with the boost matrix") {
    Rng rng(14);
    for (int i = 0; i < 50; ++i) {
      const auto p = BoostParams::from_velocity(test::random_velocity(rng));
      const Vec3 r = test::random_vec3(rng);
      const double tau = rng.uniform(-2, 2);
      const auto e = boost_coords(r, tau, p);
      const FourVector m = boost_matrix(p) * make_four(tau, r);
      CHECK(std::abs(m[0] - e.t) < 1e-13);
      CHECK(test::max_abs(spatial(m) - e.x) < 1e-13);
    }
  }
}

TEST_CASE("boost matrix preserves the metric") {
  Rng rng(15);
  for (int i = 0; i < 50; ++i) {
    const Tensor4 L = boost_matrix(BoostParams::from_velocity(test::random_velocity(rng)));
    CHECK(test::max_abs(L.transpose() * metric() * L - metric()) < 1e-12);
  }
}
