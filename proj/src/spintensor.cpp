#include "zsim/spintensor.hpp"

#include "zsim/units.hpp"

#include <algorithm>
#include <cmath>

namespace zsim {

using namespace units;

namespace {

double inf_norm(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.cwiseAbs().maxCoeff(); }

/// |lhs - rhs| / max(|T| |v|, |rhs|)
double scaled_residual(const Tensor4& t, const FourVector& v, const FourVector& rhs) {
  const FourVector lhs = t * lower(v);
  const double scale =
      std::max({t.cwiseAbs().maxCoeff() * inf_norm(v), inf_norm(rhs), 1e-300});
  return inf_norm(lhs - rhs) / scale;
}

}  // namespace

SpinTensor SpinTensor::from_vectors(const Vec3& s, const Vec3& d) {
  SpinTensor t;
  // clang-format off
  t.m_ <<  0.0,   d[0],  d[1],  d[2],
          -d[0],  0.0,  -s[2],  s[1],
          -d[1],  s[2],  0.0,  -s[0],
          -d[2], -s[1],  s[0],  0.0;
  // clang-format on
  return t;
}

SpinTensor SpinTensor::from_matrix(const Tensor4& m) {
  SpinTensor t;
  t.m_ = 0.5 * (m - m.transpose());
  return t;
}

SpinTensor build_spin_tensor(const FourVector& z, const FourVector& u, double mass) {
  return SpinTensor::from_matrix(-2.0 * mass * (z * u.transpose()));
}

SpinTensor salesi_spin_tensor(const FourVector& udot, const FourVector& u, double mass) {
  return SpinTensor::from_matrix(2.0 * mass / (kOmega0 * kOmega0) * (udot * u.transpose()));
}

SpinDecomposition decompose(const SpinTensor& s) { return {s.spin(), s.dipole()}; }

Vec3 spin_from_motion(const FourVector& z, const FourVector& u, double mass) {
  return spatial(z).cross(mass * spatial(u));
}

Vec3 dipole_from_motion(const FourVector& z, const FourVector& u, double mass) {
  const double tdot = u[0] / kLightSpeed;
  const double tz = z[0] / kLightSpeed;
  return mass * kLightSpeed * (tdot * spatial(z) - tz * spatial(u));
}

double Kinematics::tdot() const { return u[0] / kLightSpeed; }

double IdentityResiduals::max() const {
  return std::max({su, s_udot, s_pi, s_z, s_zdot, self_contraction, spin_magnitude,
                   dipole_magnitude, triad_orthonormality, triad_relations});
}

IdentityResiduals identity_suite(const Kinematics& k) {
  const Tensor4& s = k.spin.matrix();
  const double mc2 = kMass * kLightSpeed * kLightSpeed;
  const double mc = kMass * kLightSpeed;
  IdentityResiduals r;
  r.su = scaled_residual(s, k.u, FourVector::Zero());
  r.s_udot = scaled_residual(s, k.udot, mc2 * k.u);
  r.s_pi = scaled_residual(s, k.pi, -(mc * mc) * k.z);
  r.s_z = scaled_residual(s, k.z, -(kHbar / (2.0 * kOmega0)) * k.u);
  r.s_zdot = scaled_residual(s, k.zdot, mc2 * k.z);

  const Vec3 sv = k.spin.spin();
  const Vec3 dv = k.spin.dipole();
  const double s2 = sv.squaredNorm();
  const double d2 = dv.squaredNorm();
  r.self_contraction = std::abs(k.spin.self_contraction()) / std::max(2.0 * (s2 + d2), 1e-300);

  const double tdot = k.tdot();
  const double expected = kHalfHbar * tdot;
  r.spin_magnitude = std::abs(sv.norm() - expected) / expected;
  r.dipole_magnitude = std::abs(dv.norm() - expected) / expected;

  const Vec3 e_d = dv / expected;
  const Vec3 e_u = spatial(k.u) / (kLightSpeed * tdot);
  const Vec3 e_s = sv / expected;
  Eigen::Matrix3d triad;
  triad << e_d, e_u, e_s;
  r.triad_orthonormality = (triad.transpose() * triad - Eigen::Matrix3d::Identity())
                               .cwiseAbs()
                               .maxCoeff();
  const Vec3 uu = spatial(k.u);
  const double ct = kLightSpeed * tdot;
  const double rel_i = inf_norm(dv - uu.cross(sv) / ct) / inf_norm(dv);
  const double rel_ii =
      inf_norm(uu - 4.0 * kLightSpeed * kLightSpeed / (kHbar * kHbar) * sv.cross(dv) / ct) /
      inf_norm(uu);
  const double rel_iii = inf_norm(sv - dv.cross(uu) / ct) / inf_norm(sv);
  r.triad_relations = std::max({rel_i, rel_ii, rel_iii, std::abs(triad.determinant() - 1.0)});
  return r;
}

double DipoleReport::route_spread() const {
  const double a = phi;
  const double b = phi_tensor;
  const double c = phi_dipole();
  return std::max({std::abs(a - b), std::abs(a - c), std::abs(b - c)});
}

DipoleReport interaction_energy(const Kinematics& k, const FieldSample& field, double charge) {
  const Tensor4 f_tensor = field_tensor(field.electric, field.magnetic);
  const FourVector force = tensor_force(charge, f_tensor, k.u);
  const Vec3 s = k.spin.spin();
  const Vec3 d = k.spin.dipole();

  DipoleReport rep;
  rep.phi = mdot(force, k.z);
  rep.phi_tensor = -charge / (2.0 * kMass) * contract(f_tensor, k.spin.matrix());
  rep.magnetic_moment = charge / kMass * s;
  rep.electric_moment = charge / (kMass * kLightSpeed) * d;
  rep.u_m = -rep.magnetic_moment.dot(field.magnetic);
  rep.u_e = -rep.electric_moment.dot(field.electric);

  const double energy = kLightSpeed * k.pi[0];
  const Vec3 velocity = spatial(k.pi) * kLightSpeed * kLightSpeed / energy;
  const double beta2 = velocity.squaredNorm() / (kLightSpeed * kLightSpeed);
  rep.gamma_kinematic = energy / (kMass * kLightSpeed * kLightSpeed);
  rep.gamma_implied =
      std::sqrt((1.0 + rep.phi / (kMass * kLightSpeed * kLightSpeed)) / (1.0 - beta2));
  return rep;
}

EnergyReport energy_diagnostics(const Kinematics& k, const FieldSample& field, double charge) {
  const double mc2 = kMass * kLightSpeed * kLightSpeed;
  const FourVector force = lorentz_force(charge, field.electric, field.magnetic, k.u);
  EnergyReport rep;
  rep.energy = kLightSpeed * k.pi[0];
  rep.momentum = spatial(k.pi);
  rep.velocity = rep.momentum * kLightSpeed * kLightSpeed / rep.energy;
  rep.phi = mdot(force, k.z);
  rep.energy_equation_residual = mdot(k.pi, k.pi) / kMass - mc2 - rep.phi;
  rep.nonrelativistic_estimate =
      mc2 + 0.5 * kMass * rep.velocity.squaredNorm() + 0.5 * rep.phi;
  rep.nonrelativistic_error = rep.energy - rep.nonrelativistic_estimate;

  const Vec3 s = k.spin.spin();
  const Vec3 d = k.spin.dipole();
  const double ue = -charge / (kMass * kLightSpeed) * field.electric.dot(d);
  rep.ue_dominant = -charge / (kMass * kMass * kLightSpeed * kLightSpeed) *
                    field.electric.cross(rep.momentum).dot(s) / k.tdot();
  rep.ue_remainder = ue - rep.ue_dominant;
  return rep;
}

AngularMomentum angular_momentum(const Kinematics& k, const FourVector& force) {
  AngularMomentum am;
  am.orbital = k.x * k.pi.transpose() - k.pi * k.x.transpose();
  am.total = am.orbital + k.spin.matrix();
  am.total3 = spatial(k.x).cross(spatial(k.pi)) - k.spin.spin();
  am.moment = k.x * force.transpose() - force * k.x.transpose();
  return am;
}

}  // namespace zsim
