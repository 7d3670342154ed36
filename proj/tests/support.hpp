#pragma once

// Small generators for property tests. Fixed seeds keep failures reproducible.

#include "zsim/dynamics.hpp"
#include "zsim/rng.hpp"
#include "zsim/spinor.hpp"
#include "zsim/units.hpp"

#include <cmath>

namespace zsim::test {

inline Vec3 random_vec3(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline FourVector random_four(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline Vec3 random_direction(Rng& rng) {
  const double ct = rng.uniform(-1.0, 1.0);
  const double ph = rng.uniform(0.0, 2.0 * units::kPi);
  const double st = std::sqrt(1.0 - ct * ct);
  return {st * std::cos(ph), st * std::sin(ph), ct};
}

inline Vec3 random_velocity(Rng& rng, double max_speed = 0.9) {
  return rng.uniform(0.0, max_speed) * random_direction(rng);
}

inline FourVector on_shell(const Vec3& v) {
  const double g = gamma_of(v);
  return make_four(g, g * v);
}

inline RestFrameSpec random_spec(Rng& rng, double max_speed = 0.9) {
  RestFrameSpec s;
  s.theta = rng.uniform(0.0, units::kPi);
  s.phi = rng.uniform(0.0, 2.0 * units::kPi);
  s.zbw_phase = rng.uniform(0.0, 2.0 * units::kPi);
  s.velocity = random_velocity(rng, max_speed);
  s.y0 = make_four(0.0, random_vec3(rng, -2, 2));
  return s;
}

/// Energy-normalized amplitudes for the on-shell momentum of `boost`.
inline Spinor random_amplitudes(Rng& rng, const BoostParams& boost) {
  Spinor a;
  for (int i = 0; i < 4; ++i) a[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  a.normalize();
  return spinor_boost(boost) * a;
}

inline double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Eigen::Ref<const Eigen::MatrixXcd>& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace zsim::test
