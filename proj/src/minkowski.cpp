#include "zsim/minkowski.hpp"

#include "zsim/units.hpp"

#include <cmath>
#include <stdexcept>

namespace zsim {

const Tensor4& metric() {
  static const Tensor4 g = Eigen::Vector4d(1.0, -1.0, -1.0, -1.0).asDiagonal();
  return g;
}

double gamma_of(const Vec3& velocity) {
  const double beta2 = velocity.squaredNorm() / (units::kLightSpeed * units::kLightSpeed);
  if (!(beta2 < 1.0)) {
    throw std::domain_error("gamma_of: |V| must be below the speed of light");
  }
  return 1.0 / std::sqrt(1.0 - beta2);
}

BoostParams BoostParams::from_velocity(const Vec3& velocity) {
  return BoostParams{velocity, gamma_of(velocity)};
}

ObserverEvent boost_coords(const Vec3& r, double tau, const BoostParams& params) {
  constexpr double c2 = units::kLightSpeed * units::kLightSpeed;
  const Vec3& v = params.velocity;
  const double g = params.gamma;
  if (!(v.squaredNorm() < c2)) {
    throw std::domain_error("boost_coords: |V| must be below the speed of light");
  }
  const double vr = v.dot(r);
  ObserverEvent ev;
  ev.t = g * vr / c2 + g * tau;
  ev.x = r + (g * g / ((1.0 + g) * c2)) * vr * v + g * tau * v;
  return ev;
}

Tensor4 boost_matrix(const BoostParams& params) {
  constexpr double c = units::kLightSpeed;
  const Vec3 beta = params.velocity / c;
  const double g = params.gamma;
  Tensor4 lambda = Tensor4::Identity();
  lambda(0, 0) = g;
  for (int i = 0; i < 3; ++i) {
    lambda(0, i + 1) = g * beta[i];
    lambda(i + 1, 0) = g * beta[i];
    for (int j = 0; j < 3; ++j) {
      lambda(i + 1, j + 1) += g * g / (1.0 + g) * beta[i] * beta[j];
    }
  }
  return lambda;
}

double contract(const Tensor4& t, const Tensor4& u) {
  const Tensor4& g = metric();
  return (t.cwiseProduct(g * u * g)).sum();
}

}  // namespace zsim
