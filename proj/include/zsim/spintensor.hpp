#pragma once

#include "zsim/emfield.hpp"
#include "zsim/minkowski.hpp"

namespace zsim {

/// Antisymmetric contravariant spin tensor, laid out as
///   [  0   d1   d2   d3 ]
///   [ -d1   0  -s3   s2 ]
///   [ -d2  s3    0  -s1 ]
///   [ -d3 -s2   s1    0 ]
class SpinTensor {
 public:
  SpinTensor() = default;

  static SpinTensor from_vectors(const Vec3& spin, const Vec3& dipole);
  /// Keeps the antisymmetric part of `m`.
  static SpinTensor from_matrix(const Tensor4& m);

  const Tensor4& matrix() const { return m_; }
  Vec3 spin() const { return {m_(3, 2), m_(1, 3), m_(2, 1)}; }
  Vec3 dipole() const { return {m_(0, 1), m_(0, 2), m_(0, 3)}; }

  /// S^{mu nu} v_nu
  FourVector contract_lower(const FourVector& v) const { return m_ * lower(v); }
  /// S^{mu nu} S_{mu nu} = 2 s.s - 2 d.d
  double self_contraction() const { return contract(m_, m_); }

  SpinTensor& operator+=(const SpinTensor& o) {
    m_ += o.m_;
    return *this;
  }
  friend SpinTensor operator+(SpinTensor a, const SpinTensor& b) { return a += b; }
  friend SpinTensor operator-(const SpinTensor& a, const SpinTensor& b) {
    SpinTensor r;
    r.m_ = a.m_ - b.m_;
    return r;
  }
  friend SpinTensor operator*(double k, const SpinTensor& a) {
    SpinTensor r;
    r.m_ = k * a.m_;
    return r;
  }

 private:
  Tensor4 m_ = Tensor4::Zero();
};

/// S^{mu nu} = -m (z^mu u^nu - z^nu u^mu)
SpinTensor build_spin_tensor(const FourVector& z, const FourVector& u, double mass);

/// Noether form (m/omega0^2)(udot^mu u^nu - udot^nu u^mu); equals the above on solutions.
SpinTensor salesi_spin_tensor(const FourVector& udot, const FourVector& u, double mass);

struct SpinDecomposition {
  Vec3 spin = Vec3::Zero();
  Vec3 dipole = Vec3::Zero();
};

SpinDecomposition decompose(const SpinTensor& s);

/// s = z x m u
Vec3 spin_from_motion(const FourVector& z, const FourVector& u, double mass);
/// d = m c (tdot z - t_z u)
Vec3 dipole_from_motion(const FourVector& z, const FourVector& u, double mass);

/// Everything the identity and energy batteries need, whatever formulation
/// produced it. `udot` and `zdot` come from the equations of motion.
struct Kinematics {
  FourVector x = FourVector::Zero();
  FourVector u = FourVector::Zero();
  FourVector z = FourVector::Zero();
  FourVector pi = FourVector::Zero();
  FourVector udot = FourVector::Zero();
  FourVector zdot = FourVector::Zero();
  SpinTensor spin;

  FourVector y() const { return x - z; }
  double tdot() const;
};

/// Max-norm residuals, each scaled by the natural magnitude of its two sides.
struct IdentityResiduals {
  double su = 0;          // S u = 0
  double s_udot = 0;      // S udot = m c^2 u
  double s_pi = 0;        // S pi = -(mc)^2 z
  double s_z = 0;         // S z = -(hbar / 2 omega0) u
  double s_zdot = 0;      // S zdot = m c^2 z
  double self_contraction = 0;  // S.S = 0
  double spin_magnitude = 0;    // |s| = (hbar/2) tdot
  double dipole_magnitude = 0;  // |d| = (hbar/2) tdot
  double triad_orthonormality = 0;
  double triad_relations = 0;

  double max() const;
};

IdentityResiduals identity_suite(const Kinematics& k);

struct DipoleReport {
  double phi = 0;         // f . z
  double phi_tensor = 0;  // -(q/2m) F^{mu nu} S_{mu nu}
  double u_m = 0;
  double u_e = 0;
  Vec3 magnetic_moment = Vec3::Zero();
  Vec3 electric_moment = Vec3::Zero();
  double gamma_kinematic = 1;  // E / m c^2
  double gamma_implied = 1;    // from gamma^2 = (1 + Phi/mc^2)/(1 - V^2/c^2)

  double phi_dipole() const { return u_m + u_e; }
  /// Largest disagreement between the three routes to Phi.
  double route_spread() const;
};

DipoleReport interaction_energy(const Kinematics& k, const FieldSample& field, double charge);

struct EnergyReport {
  double energy = 0;
  Vec3 momentum = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double phi = 0;
  /// (1/m) pi.pi - m c^2 - Phi
  double energy_equation_residual = 0;
  /// m c^2 + m V^2 / 2 + Phi / 2
  double nonrelativistic_estimate = 0;
  double nonrelativistic_error = 0;
  /// -(q / m^2 c^2)(E x P).s / tdot
  double ue_dominant = 0;
  double ue_remainder = 0;
};

EnergyReport energy_diagnostics(const Kinematics& k, const FieldSample& field, double charge);

struct AngularMomentum {
  Tensor4 orbital = Tensor4::Zero();  // L = x pi - pi x
  Tensor4 total = Tensor4::Zero();    // J = L + S
  Vec3 total3 = Vec3::Zero();         // x x P - s
  Tensor4 moment = Tensor4::Zero();   // M = x f - f x
};

AngularMomentum angular_momentum(const Kinematics& k, const FourVector& force);

}  // namespace zsim
