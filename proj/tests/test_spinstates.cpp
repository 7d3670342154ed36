#include "doctest.h"
#include "support.hpp"

#include "zsim/spinstates.hpp"

#include <Eigen/Eigenvalues>

using namespace zsim;
using namespace zsim::units;
using doctest::Approx;

TEST_CASE("SpinAxis") {
  const SpinAxis a = SpinAxis::from_angles(0.7, 1.9);
  CHECK(a.n().norm() == Approx(1.0).epsilon(1e-15));
  CHECK(a.n()[2] == Approx(std::cos(0.7)));
  CHECK(a.n()[0] == Approx(std::sin(0.7) * std::cos(1.9)));
  const SpinAxis b = SpinAxis::from_vector(a.n());
  CHECK(b.theta() == Approx(0.7).epsilon(1e-14));
  CHECK(b.phi() == Approx(1.9).epsilon(1e-14));
  CHECK_THROWS_AS(SpinAxis::from_vector(Vec3(1, 1, 0)), std::invalid_argument);
}

TEST_CASE("sigma_n") {
  CHECK(test::max_abs(sigma_n(SpinAxis::from_angles(0, 0)) - Eigen::Matrix2cd(Eigen::Vector2cd(1, -1).asDiagonal())) < 1e-16);
  Eigen::Matrix2cd s1;
  s1 << 0, 1, 1, 0;
  CHECK(test::max_abs(sigma_n(SpinAxis::from_angles(kPi / 2, 0)) - s1) < 1e-16);
  Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const SpinAxis ax = SpinAxis::from_vector(test::random_direction(rng));
    const Eigen::Matrix2cd s = sigma_n(ax);
    CHECK(test::max_abs(s - s.adjoint()) < 1e-15);
    CHECK(std::abs(s.trace()) < 1e-15);
    CHECK(test::max_abs(s * s - Eigen::Matrix2cd::Identity()) < 1e-14);
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(s).eigenvalues();
    CHECK(ev[0] == Approx(-1.0).epsilon(1e-14));
    CHECK(ev[1] == Approx(1.0).epsilon(1e-14));
    CHECK(s_n_operator(ax).is_observable());
  }
}

TEST_CASE("spin states") {
  const double r = 1 / std::sqrt(2.0);
  SUBCASE("theta = 0 is phi_up with A1 = A4 = 1/sqrt 2") {
    const Spinor a = spin_state(SpinAxis::from_angles(0, 0), 0).phi;
    CHECK(std::abs(a[0] - r) < 1e-16);
    CHECK(std::abs(a[3] - r) < 1e-16);
    CHECK(std::abs(a[1]) < 1e-16);
    CHECK(std::abs(a[2]) < 1e-16);
    CHECK(test::max_abs(a - phi_up(0, 0).phi) == 0.0);
    CHECK(test::max_abs(spin_state(SpinAxis::from_angles(kPi, 0.4), 0).phi - phi_dn(0.4, 0).phi) < 1e-15);
  }
  SUBCASE("s = (hbar/2) n and s_n = hbar/2 for any axis") {
    Rng rng(52);
    for (int i = 0; i < 100; ++i) {
      const SpinAxis ax = SpinAxis::from_vector(test::random_direction(rng));
      const double tau = rng.uniform(0, 10);
      const Spinor phi = spin_state(ax, tau).phi;
      CHECK(test::max_abs(spin_tensor_of(phi).spin() - 0.5 * ax.n()) < 1e-14);
      CHECK(observable(phi, s_n_operator(ax)) == Approx(0.5).epsilon(1e-14));
      CHECK(std::real(phi.dot(sigma_big(ax) * phi)) * 0.5 == Approx(0.5).epsilon(1e-14));
    }
  }
  SUBCASE("superposition of up and down") {
    Rng rng(53);
    for (int i = 0; i < 50; ++i) {
      const double th = rng.uniform(0, kPi), ph = rng.uniform(0, 2 * kPi), tau = rng.uniform(0, 5);
      const Spinor n = spin_state(SpinAxis::from_angles(th, ph), tau).phi;
      const Spinor sup = std::cos(th / 2) * phi_up(ph, tau).phi + std::sin(th / 2) * phi_dn(ph, tau).phi;
      CHECK(test::max_abs(n - sup) < 1e-15);
    }
  }
  SUBCASE("up and down are orthonormal under the Hermitian product") {
    const Spinor u = phi_up(0.3, 1.1).phi, d = phi_dn(0.3, 1.1).phi;
    CHECK(std::abs(u.dot(u) - 1.0) < 1e-15);
    CHECK(std::abs(d.dot(d) - 1.0) < 1e-15);
    CHECK(std::abs(u.dot(d)) < 1e-15);
  }
}

TEST_CASE("rest-frame observables") {
  SUBCASE("spin-up: circular velocity in the x1-x2 plane") {
    const Spinor a = phi_up(0, 0).phi;
    for (double tau : {0.0, 0.4, 1.3, 2.9}) {
      const RestObservables o = restframe_observables(a, tau);
      CHECK(o.u[0] == Approx(1.0));
      CHECK(o.u[1] == Approx(std::cos(2 * tau)).epsilon(1e-14));
      CHECK(o.u[2] == Approx(std::sin(2 * tau)).epsilon(1e-14));
      CHECK(std::abs(o.u[3]) < 1e-15);
      CHECK(test::max_abs(o.s - Vec3(0, 0, 0.5)) < 1e-15);
    }
  }
  SUBCASE("spin-down") {
    CHECK(test::max_abs(restframe_observables(phi_dn(0, 0).phi, 0.8).s - Vec3(0, 0, -0.5)) < 1e-15);
  }
  SUBCASE("closed forms agree with the bilinears; u is orthogonal to n") {
    Rng rng(54);
    for (int i = 0; i < 100; ++i) {
      const SpinAxis ax = SpinAxis::from_vector(test::random_direction(rng));
      const Spinor a = rest_amplitudes(ax);
      const double tau = rng.uniform(0, 10);
      const RestObservables o = restframe_observables(a, tau);
      const Spinor phi = evolve_rest(a, tau).phi;
      CHECK(test::max_abs(o.u - velocity_of(phi)) < 1e-14);
      CHECK(test::max_abs(o.s - spin_tensor_of(phi).spin()) < 1e-14);
      CHECK(std::abs(spatial(o.u).dot(ax.n())) < 1e-14);
      CHECK(spatial(o.u).norm() == Approx(1.0).epsilon(1e-14));
      // |udot| = c omega0
      const double h = 1e-5;
      const Vec3 udot = (spatial(restframe_observables(a, tau + h).u) -
                         spatial(restframe_observables(a, tau - h).u)) / (2 * h);
      CHECK(udot.norm() == Approx(kOmega0).epsilon(1e-8));
      // s constant in tau
      CHECK(test::max_abs(restframe_observables(a, tau + 1.0).s - o.s) < 1e-14);
    }
  }
}

TEST_CASE("malus") {
  CHECK(malus(0).up == 1.0);
  CHECK(malus(0).down == 0.0);
  CHECK(malus(kPi / 2).up == Approx(0.5).epsilon(1e-15));
  CHECK(malus(2 * kPi / 3).up == Approx(0.25).epsilon(1e-14));
  CHECK(malus(2 * kPi / 3).down == Approx(0.75).epsilon(1e-14));
  CHECK(malus(1.234).up + malus(1.234).down == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(malus(-0.1), std::domain_error);
  CHECK_THROWS_AS(malus(3.2), std::domain_error);
}

TEST_CASE("Stern-Gerlach sampling") {
  SUBCASE("aligned: all up") {
    const SternGerlachTally t = sample_stern_gerlach(SpinAxis::from_angles(0, 0), Vec3(0, 0, 1), 1000, 7);
    CHECK(t.n_up == 1000);
    CHECK(t.n_dn == 0);
  }
  SUBCASE("theta = pi/2 within 3 sigma") {
    const SternGerlachTally t =
        sample_stern_gerlach(SpinAxis::from_angles(kPi / 2, 0), Vec3(0, 0, 1), 100000, 2024);
    CHECK(t.n_up + t.n_dn == 100000);
    CHECK(std::abs(t.p_hat - 0.5) < 0.0047);
    CHECK(t.p_theory == Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("deterministic under a fixed seed") {
    const auto a = sample_stern_gerlach(SpinAxis::from_angles(1.0, 0.3), Vec3(0, 0, 1), 5000, 99);
    const auto b = sample_stern_gerlach(SpinAxis::from_angles(1.0, 0.3), Vec3(0, 0, 1), 5000, 99);
    CHECK(a.n_up == b.n_up);
    CHECK(a.to_json().dump() == b.to_json().dump());
  }
  SUBCASE("mean u3 of the outcomes is 0 while the input state has -sin(theta) cos(w0 tau)") {
    const double th = 1.0, tau = 0.3;
    const auto t = sample_stern_gerlach(SpinAxis::from_angles(th, 0), Vec3(0, 0, 1), 20000, 5, tau);
    CHECK(std::abs(t.sampled_mean_velocity[3]) < 1e-14);
    CHECK(t.input_velocity[3] == Approx(-std::sin(th) * std::cos(kOmega0 * tau)).epsilon(1e-12));
  }
  SUBCASE("bad count") {
    CHECK_THROWS_AS(sample_stern_gerlach(SpinAxis::from_angles(0, 0), Vec3(0, 0, 1), 0, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("axis noncommutativity") {
  const SpinAxis e3 = SpinAxis::from_angles(0, 0);
  const SpinAxis e1 = SpinAxis::from_angles(kPi / 2, 0);
  CHECK(axis_noncommutativity(e3, e3) == 0.0);
  CHECK(axis_noncommutativity(e3, SpinAxis::from_angles(kPi, 0)) < 1e-15);
  // [sigma3, sigma1] = 2 i sigma2 in each block: Frobenius norm 2 * sqrt(2) * sqrt(2)
  CHECK(axis_noncommutativity(e3, e1) == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("Pauli state") {
  const Eigen::Vector2cd p = pauli_state(rest_amplitudes(SpinAxis::from_angles(1.2, 0.5)));
  CHECK(std::abs(p[0] - std::cos(0.6)) < 1e-15);
  CHECK(std::abs(p[1] - std::polar(std::sin(0.6), 0.5)) < 1e-15);
}
