#include "zsim/spinstates.hpp"

#include "zsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zsim {

using namespace units;

namespace {

constexpr Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Complex expi(double a) { return std::polar(1.0, a); }

/// Orthonormal basis whose third vector is `d`. The first vector comes from
/// the coordinate axis least aligned with d, so the choice is deterministic.
Eigen::Matrix3d device_basis(const Vec3& d) {
  Eigen::Index k = 0;
  d.cwiseAbs().minCoeff(&k);
  Vec3 seed = Vec3::Zero();
  seed[k] = 1.0;
  const Vec3 e1 = (seed - seed.dot(d) * d).normalized();
  const Vec3 e2 = d.cross(e1);
  Eigen::Matrix3d b;
  b << e1, e2, d;
  return b;
}

}  // namespace

SpinAxis SpinAxis::from_angles(double theta, double phi) {
  const Vec3 n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  return SpinAxis(n, theta, phi);
}

SpinAxis SpinAxis::from_vector(const Vec3& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("spin axis must be a unit vector");
  const double theta = std::acos(std::clamp(n[2], -1.0, 1.0));
  const double phi = (n[0] == 0.0 && n[1] == 0.0) ? 0.0 : std::atan2(n[1], n[0]);
  return SpinAxis(n, theta, phi);
}

Eigen::Matrix2cd sigma_n(const SpinAxis& axis) {
  const Vec3& n = axis.n();
  Eigen::Matrix2cd s;
  s << n[2], Complex(n[0], -n[1]), Complex(n[0], n[1]), -n[2];
  return s;
}

OperatorMatrix s_n_operator(const SpinAxis& axis) {
  OperatorMatrix op;
  op.m.topLeftCorner<2, 2>() = kHalfHbar * sigma_n(axis);
  op.m.bottomRightCorner<2, 2>() = kHalfHbar * sigma_n(axis);
  return op;
}

CMatrix4 sigma_big(const SpinAxis& axis) {
  CMatrix4 m = CMatrix4::Zero();
  m.topLeftCorner<2, 2>() = sigma_n(axis);
  m.bottomRightCorner<2, 2>() = -sigma_n(axis);
  return m;
}

Spinor rest_amplitudes(const SpinAxis& axis) {
  const double c = std::cos(0.5 * axis.theta());
  const double s = std::sin(0.5 * axis.theta());
  const double h = 0.5 * axis.phi();
  Spinor a;
  a << kInvSqrt2 * expi(-h) * c, kInvSqrt2 * expi(h) * s, -kInvSqrt2 * expi(-h) * s,
      kInvSqrt2 * expi(h) * c;
  return a;
}

StateFunction evolve_rest(const Spinor& a, double tau) {
  const Complex em = expi(-kOmega1 * tau);
  const Complex ep = expi(kOmega1 * tau);
  Spinor phi;
  phi << a[0] * em, a[1] * em, a[2] * ep, a[3] * ep;
  return {phi, tau};
}

StateFunction spin_state(const SpinAxis& axis, double tau) {
  return evolve_rest(rest_amplitudes(axis), tau);
}

StateFunction phi_up(double phi, double tau) {
  return spin_state(SpinAxis::from_angles(0.0, phi), tau);
}

StateFunction phi_dn(double phi, double tau) {
  return spin_state(SpinAxis::from_angles(kPi, phi), tau);
}

RestObservables restframe_observables(const Spinor& a, double tau) {
  const Complex a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3];
  const Complex ep = expi(kOmega0 * tau);
  const Complex em = std::conj(ep);
  const double c = kLightSpeed;
  RestObservables o;
  o.u[0] = c * a.squaredNorm();
  o.u[1] = (c * (std::conj(a1) * a4 + std::conj(a2) * a3) * ep +
            c * (a1 * std::conj(a4) + a2 * std::conj(a3)) * em)
               .real();
  o.u[2] = (-kI * c * (std::conj(a1) * a4 - std::conj(a2) * a3) * ep +
            kI * c * (a1 * std::conj(a4) - a2 * std::conj(a3)) * em)
               .real();
  o.u[3] = (c * (std::conj(a1) * a3 - std::conj(a2) * a4) * ep +
            c * (a1 * std::conj(a3) - a2 * std::conj(a4)) * em)
               .real();
  o.s[0] = kHalfHbar *
           (std::conj(a1) * a2 + a1 * std::conj(a2) - std::conj(a3) * a4 - a3 * std::conj(a4)).real();
  o.s[1] = (-kI * kHalfHbar *
            (std::conj(a1) * a2 - a1 * std::conj(a2) - std::conj(a3) * a4 + a3 * std::conj(a4)))
               .real();
  o.s[2] = kHalfHbar * (std::norm(a1) - std::norm(a2) - std::norm(a3) + std::norm(a4));
  return o;
}

MalusProbabilities malus(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) throw std::domain_error("malus: theta must lie in [0, pi]");
  const double c = std::cos(0.5 * theta);
  const double up = c * c;
  return {up, 1.0 - up};
}

nlohmann::json SternGerlachTally::to_json() const {
  auto vec = [](const FourVector& v) { return nlohmann::json::array({v[0], v[1], v[2], v[3]}); };
  return {{"n_up", n_up},
          {"n_dn", n_dn},
          {"p_hat", p_hat},
          {"p_theory", p_theory},
          {"z_score", z_score},
          {"sampled_mean_velocity", vec(sampled_mean_velocity)},
          {"input_velocity", vec(input_velocity)}};
}

SternGerlachTally sample_stern_gerlach(const SpinAxis& axis, const Vec3& device_axis,
                                       std::int64_t count, std::uint64_t seed, double phase_tau) {
  if (count <= 0) throw std::invalid_argument("sample count must be positive");
  const SpinAxis device = SpinAxis::from_vector(device_axis);
  const Eigen::Matrix3d basis = device_basis(device.n());
  const SpinAxis local = SpinAxis::from_vector((basis.transpose() * axis.n()).normalized());
  const double p = malus(local.theta()).up;

  Rng rng(seed);
  SternGerlachTally t;
  for (std::int64_t i = 0; i < count; ++i) {
    if (rng.uniform() < p)
      ++t.n_up;
    else
      ++t.n_dn;
  }
  const double n = static_cast<double>(count);
  t.p_hat = static_cast<double>(t.n_up) / n;
  t.p_theory = p;
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  t.z_score = sigma > 0.0 ? (t.p_hat - p) / sigma : 0.0;

  const FourVector u_up = restframe_observables(rest_amplitudes(SpinAxis::from_angles(0.0, local.phi())), phase_tau).u;
  const FourVector u_dn = restframe_observables(rest_amplitudes(SpinAxis::from_angles(kPi, local.phi())), phase_tau).u;
  t.sampled_mean_velocity = (static_cast<double>(t.n_up) * u_up + static_cast<double>(t.n_dn) * u_dn) / n;
  t.input_velocity = restframe_observables(rest_amplitudes(local), phase_tau).u;
  return t;
}

double axis_noncommutativity(const SpinAxis& a, const SpinAxis& b) {
  const CMatrix4 sa = sigma_big(a);
  const CMatrix4 sb = sigma_big(b);
  return (sa * sb - sb * sa).norm();
}

Eigen::Vector2cd pauli_state(const Spinor& a) {
  Eigen::Vector2cd p = a.head<2>();
  const double nrm = p.norm();
  if (nrm == 0.0) return p;
  // Strip the phase of the first nonzero component.
  const Complex ref = std::abs(p[0]) > 1e-300 ? p[0] : p[1];
  return p * (std::abs(ref) / ref) / nrm;
}

}  // namespace zsim
