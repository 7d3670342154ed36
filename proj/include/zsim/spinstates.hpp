#pragma once

#include "zsim/rng.hpp"
#include "zsim/spinor.hpp"

#include "json.hpp"

#include <cstdint>

namespace zsim {

/// Unit spin axis with x^3 as the polar axis.
class SpinAxis {
 public:
  static SpinAxis from_angles(double theta, double phi);
  /// Rejects vectors whose norm differs from 1 by more than 1e-12.
  static SpinAxis from_vector(const Vec3& n);

  const Vec3& n() const { return n_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  SpinAxis(const Vec3& n, double theta, double phi) : n_(n), theta_(theta), phi_(phi) {}
  Vec3 n_;
  double theta_;
  double phi_;
};

/// sigma_n = n^j sigma^j
Eigen::Matrix2cd sigma_n(const SpinAxis& axis);
/// n^j s^j = (hbar/2) diag(sigma_n, sigma_n)
OperatorMatrix s_n_operator(const SpinAxis& axis);
/// The Hermitian Sigma_n = diag(sigma_n, -sigma_n) with s_n = (hbar/2) phi^* Sigma_n phi.
CMatrix4 sigma_big(const SpinAxis& axis);

/// Rest-frame amplitudes A_i = phi_i(0) of the +hbar/2 eigenstate along the axis.
Spinor rest_amplitudes(const SpinAxis& axis);

/// [A1 e^{-i w1 tau}, A2 e^{-i w1 tau}, A3 e^{i w1 tau}, A4 e^{i w1 tau}]
StateFunction evolve_rest(const Spinor& a, double tau);
StateFunction spin_state(const SpinAxis& axis, double tau);
/// theta = 0 and theta = pi states sharing the azimuth `phi`.
StateFunction phi_up(double phi, double tau);
StateFunction phi_dn(double phi, double tau);

struct RestObservables {
  FourVector u = FourVector::Zero();
  Vec3 s = Vec3::Zero();
};

/// Closed-form bilinears of evolve_rest(A, tau), written out in the amplitudes.
RestObservables restframe_observables(const Spinor& a, double tau);

struct MalusProbabilities {
  double up = 1.0;
  double down = 0.0;
};

/// P_up = cos^2(theta/2); theta must lie in [0, pi].
MalusProbabilities malus(double theta);

struct SternGerlachTally {
  std::int64_t n_up = 0;
  std::int64_t n_dn = 0;
  double p_hat = 0;
  double p_theory = 0;
  double z_score = 0;

  /// Mean velocity over the two outcome states (weighted by the sampled
  /// counts) against the velocity of the input state, both in the device
  /// frame at the requested proper time.
  FourVector sampled_mean_velocity = FourVector::Zero();
  FourVector input_velocity = FourVector::Zero();

  nlohmann::json to_json() const;
};

/// Bernoulli sampling of up/down outcomes with p = malus(angle(axis, device)).
/// `phase_tau` only feeds the velocity diagnostics; it never affects outcomes.
SternGerlachTally sample_stern_gerlach(const SpinAxis& axis, const Vec3& device_axis,
                                       std::int64_t count, std::uint64_t seed,
                                       double phase_tau = 0.0);

/// Frobenius norm of [Sigma_a, Sigma_b].
double axis_noncommutativity(const SpinAxis& a, const SpinAxis& b);

/// Upper components of the amplitudes with the common phase removed, i.e. the
/// two-component Pauli spinor (cos(theta/2), e^{i phi} sin(theta/2)).
Eigen::Vector2cd pauli_state(const Spinor& a);

}  // namespace zsim
