#pragma once

#include <Eigen/Dense>

#include <utility>

namespace zsim {

using Vec3 = Eigen::Vector3d;
/// Contravariant components (x^0, x^1, x^2, x^3).
using FourVector = Eigen::Vector4d;
using Tensor4 = Eigen::Matrix4d;

/// Minkowski metric diag(1,-1,-1,-1); g_{mu nu} = g^{mu nu}.
const Tensor4& metric();

/// Covariant components a_mu = g_{mu nu} a^nu.
inline FourVector lower(const FourVector& a) { return {a[0], -a[1], -a[2], -a[3]}; }
/// Raising with the same metric; lower(raise(a)) == a exactly.
inline FourVector raise(const FourVector& a) { return lower(a); }

/// a^0 b^0 - a.b
inline double mdot(const FourVector& a, const FourVector& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

inline FourVector make_four(double t, const Vec3& x) { return {t, x[0], x[1], x[2]}; }
inline Vec3 spatial(const FourVector& a) { return a.tail<3>(); }

/// Lorentz factor (1 - V^2/c^2)^{-1/2}; throws std::domain_error for |V| >= c.
double gamma_of(const Vec3& velocity);

struct BoostParams {
  Vec3 velocity = Vec3::Zero();
  double gamma = 1.0;

  /// Validates |V| < c and fills gamma.
  static BoostParams from_velocity(const Vec3& velocity);
};

struct ObserverEvent {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
};

/// Observer-frame event for the rest-frame event (c tau, r) of a frame moving
/// with velocity V (aligned axes, origins coincide at tau = 0).
ObserverEvent boost_coords(const Vec3& r, double tau, const BoostParams& params);

/// Matrix Lambda with x_observer = Lambda x_rest for the same boost.
Tensor4 boost_matrix(const BoostParams& params);

/// Lambda T Lambda^T for a contravariant rank-2 tensor.
inline Tensor4 boost_tensor(const Tensor4& t, const Tensor4& lambda) {
  return lambda * t * lambda.transpose();
}

/// Full contraction T^{mu nu} U_{mu nu}.
double contract(const Tensor4& t, const Tensor4& u);

}  // namespace zsim
