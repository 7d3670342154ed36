#include "zsim/spinor.hpp"

#include "zsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zsim {

using namespace units;

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const CMatrix4& m) { return m.cwiseAbs().maxCoeff(); }

std::array<CMatrix4, 4> build_gammas() {
  using Eigen::Matrix2cd;
  Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  s3 << 1, 0, 0, -1;
  std::array<CMatrix4, 4> g;
  g[0] = CMatrix4::Zero();
  g[0].diagonal() << 1, 1, -1, -1;
  const std::array<Matrix2cd, 3> sig{s1, s2, s3};
  for (int i = 0; i < 3; ++i) {
    g[i + 1] = CMatrix4::Zero();
    g[i + 1].topRightCorner<2, 2>() = sig[i];
    g[i + 1].bottomLeftCorner<2, 2>() = -sig[i];
  }
  return g;
}

double lower_sign(int mu) { return mu == 0 ? 1.0 : -1.0; }

}  // namespace

const std::array<CMatrix4, 4>& gamma_matrices() {
  static const std::array<CMatrix4, 4> g = build_gammas();
  return g;
}

bool OperatorMatrix::is_observable(double tol) const {
  const CMatrix4 h = gamma_matrices()[0] * m;
  return max_abs(h - h.adjoint()) <= tol;
}

AdjointSpinor::AdjointSpinor(const Spinor& phi)
    : row_(phi.adjoint() * gamma_matrices()[0]) {}

OperatorMatrix hamiltonian(const FourVector& pi) {
  const auto& g = gamma_matrices();
  const FourVector pl = lower(pi);
  OperatorMatrix h;
  for (int mu = 0; mu < 4; ++mu) h.m += kLightSpeed * pl[mu] * g[mu];
  return h;
}

OperatorMatrix velocity_operator(int mu) { return {kLightSpeed * gamma_matrices().at(mu)}; }

OperatorMatrix spin_operator(int mu, int nu) {
  const auto& g = gamma_matrices();
  const CMatrix4 comm = g.at(mu) * g.at(nu) - g.at(nu) * g.at(mu);
  return {Complex(0.0, -kHbar / 4.0) * comm};
}

double observable(const Spinor& phi, const OperatorMatrix& q) {
  if (!q.is_observable(1e-12)) throw NotObservable("operator is not observable (gamma0 Q not Hermitian)");
  const Complex v = adjoint(phi).sandwich(q, phi);
  const double scale = std::max(1.0, phi.squaredNorm() * max_abs(q.m));
  if (std::abs(v.imag()) > 1e-10 * scale)
    throw std::logic_error("observable has imaginary residue " + std::to_string(v.imag()));
  return v.real();
}

FourVector velocity_of(const Spinor& phi) {
  const AdjointSpinor bar(phi);
  const auto& g = gamma_matrices();
  FourVector u;
  for (int mu = 0; mu < 4; ++mu) u[mu] = kLightSpeed * (bar.row() * g[mu] * phi)(0, 0).real();
  return u;
}

SpinTensor spin_tensor_of(const Spinor& phi) {
  const AdjointSpinor bar(phi);
  Tensor4 s = Tensor4::Zero();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) {
      s(mu, nu) = bar.sandwich(spin_operator(mu, nu), phi).real();
      s(nu, mu) = -s(mu, nu);
    }
  return SpinTensor::from_matrix(s);
}

void require_energy_normalized(const Spinor& a, const FourVector& pi, double tol) {
  const Complex e = adjoint(a).sandwich(hamiltonian(pi), a);
  if (std::abs(e - Complex(kRestEnergy, 0.0)) > tol)
    throw NormalizationError("state is not energy-normalized: phi-bar H phi = " +
                             std::to_string(e.real()));
}

StateFunction closed_form_state(const Spinor& a, const FourVector& pi, double tau) {
  require_energy_normalized(a, pi);
  const double w = kOmega1 * tau;
  const CMatrix4 evo = std::cos(w) * CMatrix4::Identity() -
                       kI * (std::sin(w) / kRestEnergy) * hamiltonian(pi).m;
  return {evo * a, tau};
}

OperatorMatrix energy_projector(const FourVector& pi, int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  return {0.5 * (CMatrix4::Identity() + (s / kRestEnergy) * hamiltonian(pi).m)};
}

EnergySplit energy_split(const Spinor& a, const FourVector& pi) {
  EnergySplit out;
  out.plus = energy_projector(pi, +1).m * a;
  out.minus = a - out.plus;
  return out;
}

double OperatorIdentityResiduals::max() const {
  return std::max({anticommutation, velocity_commutator, spin_commutator, hamiltonian_square,
                   sandwich, projector_idempotence, projector_complement, observability});
}

OperatorIdentityResiduals operator_identity_suite(const FourVector& pi) {
  const auto& g = gamma_matrices();
  const CMatrix4 id = CMatrix4::Identity();
  const CMatrix4 h = hamiltonian(pi).m;
  const FourVector pl = lower(pi);
  const double c2 = kLightSpeed * kLightSpeed;
  OperatorIdentityResiduals r;

  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const double gmn = mu == nu ? lower_sign(mu) : 0.0;
      r.anticommutation =
          std::max(r.anticommutation, max_abs(g[mu] * g[nu] + g[nu] * g[mu] - 2.0 * gmn * id));
    }

  for (int mu = 0; mu < 4; ++mu) {
    const CMatrix4 u = velocity_operator(mu).m;
    const CMatrix4 lhs = (kI / kHbar) * (h * u - u * h);
    CMatrix4 rhs = CMatrix4::Zero();
    for (int nu = 0; nu < 4; ++nu)
      rhs += (4.0 * c2 / (kHbar * kHbar)) * pl[nu] * spin_operator(mu, nu).m;
    r.velocity_commutator = std::max(r.velocity_commutator, max_abs(lhs - rhs));

    for (int nu = 0; nu < 4; ++nu) {
      const CMatrix4 s = spin_operator(mu, nu).m;
      const CMatrix4 l2 = (kI / kHbar) * (h * s - s * h);
      const CMatrix4 r2 = pi[mu] * velocity_operator(nu).m - pi[nu] * velocity_operator(mu).m;
      r.spin_commutator = std::max(r.spin_commutator, max_abs(l2 - r2));
      r.observability = std::max(
          r.observability, max_abs(g[0] * s - (g[0] * s).adjoint()));
    }
    r.observability = std::max(r.observability, max_abs(g[0] * u - (g[0] * u).adjoint()));

    const CMatrix4 sand = h * g[mu] * h;
    const CMatrix4 sand_rhs =
        -(kRestEnergy * kRestEnergy) * g[mu] + 2.0 * kLightSpeed * pi[mu] * h;
    r.sandwich = std::max(r.sandwich, max_abs(sand - sand_rhs));
  }
  r.hamiltonian_square = max_abs(h * h - c2 * mdot(pi, pi) * id);

  const CMatrix4 pp = energy_projector(pi, +1).m;
  const CMatrix4 pm = energy_projector(pi, -1).m;
  r.projector_idempotence = std::max(max_abs(pp * pp - pp), max_abs(pm * pm - pm));
  r.projector_complement = std::max(max_abs(pp * pm), max_abs(pp + pm - id));
  return r;
}

VelocityComparison appendixB_velocity(const Spinor& a, const FourVector& pi, double tau) {
  require_energy_normalized(a, pi);
  const FourVector u0 = velocity_of(a);
  const FourVector udot0 =
      (4.0 * kLightSpeed * kLightSpeed / (kHbar * kHbar)) * spin_tensor_of(a).contract_lower(pi);
  const FourVector drift = pi / kMass;
  VelocityComparison out;
  out.closed_form = (u0 - drift) * std::cos(kOmega0 * tau) +
                    (udot0 / kOmega0) * std::sin(kOmega0 * tau) + drift;
  out.from_spinor = velocity_of(closed_form_state(a, pi, tau).phi);
  return out;
}

CMatrix4 spinor_boost(const BoostParams& params) {
  const double speed = params.velocity.norm();
  if (speed == 0.0) return CMatrix4::Identity();
  const double eta = std::atanh(speed / kLightSpeed);
  const Vec3 n = params.velocity / speed;
  const auto& g = gamma_matrices();
  CMatrix4 gen = CMatrix4::Zero();
  for (int i = 0; i < 3; ++i) gen += n[i] * (g[0] * g[i + 1]);
  return std::cosh(0.5 * eta) * CMatrix4::Identity() + std::sinh(0.5 * eta) * gen;
}

}  // namespace zsim
