#pragma once

#include "zsim/minkowski.hpp"
#include "zsim/spintensor.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>

namespace zsim {

using Complex = std::complex<double>;
using Spinor = Eigen::Vector4cd;
using CMatrix4 = Eigen::Matrix4cd;

/// Dirac-representation gamma^mu (contravariant index).
const std::array<CMatrix4, 4>& gamma_matrices();

/// A complex 4x4 operator. Observables are those whose gamma^0 M is Hermitian.
struct OperatorMatrix {
  CMatrix4 m = CMatrix4::Zero();

  bool is_observable(double tol = 1e-14) const;
};

/// phi-bar = phi^* gamma^0, kept as its own type so a plain Hermitian product
/// can't be used by accident.
class AdjointSpinor {
 public:
  explicit AdjointSpinor(const Spinor& phi);

  const Eigen::RowVector4cd& row() const { return row_; }
  Complex operator*(const Spinor& psi) const { return (row_ * psi)(0, 0); }
  /// phi-bar Q psi
  Complex sandwich(const OperatorMatrix& q, const Spinor& psi) const {
    return (row_ * q.m * psi)(0, 0);
  }

 private:
  Eigen::RowVector4cd row_;
};

inline AdjointSpinor adjoint(const Spinor& phi) { return AdjointSpinor(phi); }

/// H = c pi_mu gamma^mu
OperatorMatrix hamiltonian(const FourVector& pi);
/// u^mu = c gamma^mu
OperatorMatrix velocity_operator(int mu);
/// S^{mu nu} = -(i hbar / 4)[gamma^mu, gamma^nu]
OperatorMatrix spin_operator(int mu, int nu);

class NotObservable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real value phi-bar Q phi. Rejects non-observable Q and imaginary residue above 1e-10.
double observable(const Spinor& phi, const OperatorMatrix& q);

/// u^mu = phi-bar u^mu phi
FourVector velocity_of(const Spinor& phi);
/// S^{mu nu} = phi-bar S^{mu nu} phi
SpinTensor spin_tensor_of(const Spinor& phi);

struct StateFunction {
  Spinor phi = Spinor::Zero();
  double tau = 0.0;
};

class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws NormalizationError unless |phi-bar H phi - mc^2| <= tol.
void require_energy_normalized(const Spinor& a, const FourVector& pi, double tol = 1e-10);

/// phi(tau) = [cos(omega1 tau) I - (i/mc^2) sin(omega1 tau) H] A
StateFunction closed_form_state(const Spinor& a, const FourVector& pi, double tau);

struct EnergySplit {
  Spinor plus = Spinor::Zero();
  Spinor minus = Spinor::Zero();
};

/// Projectors (I +- H/mc^2)/2 for on-shell pi.
OperatorMatrix energy_projector(const FourVector& pi, int sign);
EnergySplit energy_split(const Spinor& a, const FourVector& pi);

/// Max-norm residuals of the exact matrix identities for a given on-shell pi.
struct OperatorIdentityResiduals {
  double anticommutation = 0;
  double velocity_commutator = 0;  // (i/hbar)[H, u^mu] = (4c^2/hbar^2) S^{mu nu} pi_nu
  double spin_commutator = 0;      // (i/hbar)[H, S^{mu nu}] = pi^mu u^nu - pi^nu u^mu
  double hamiltonian_square = 0;   // H^2 = c^2 (pi.pi) I
  double sandwich = 0;             // H g H = -(mc^2)^2 g + 2 c pi^mu H
  double projector_idempotence = 0;
  double projector_complement = 0; // P+ P- = 0, P+ + P- = I
  double observability = 0;        // gamma^0 u^mu, gamma^0 S^{mu nu} Hermitian

  double max() const;
};

OperatorIdentityResiduals operator_identity_suite(const FourVector& pi);

struct VelocityComparison {
  FourVector closed_form = FourVector::Zero();
  FourVector from_spinor = FourVector::Zero();
  double residual() const { return (closed_form - from_spinor).cwiseAbs().maxCoeff(); }
};

/// u(tau) = (u(0) - pi/m) cos(omega0 tau) + (udot(0)/omega0) sin(omega0 tau) + pi/m,
/// next to the observable of closed_form_state at the same tau.
VelocityComparison appendixB_velocity(const Spinor& a, const FourVector& pi, double tau);

/// Spinor representation of the boost to an observer that sees the rest frame
/// moving with velocity V: velocity_of(B phi) = Lambda velocity_of(phi).
CMatrix4 spinor_boost(const BoostParams& params);

}  // namespace zsim
