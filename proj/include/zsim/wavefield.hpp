#pragma once

#include "zsim/minkowski.hpp"
#include "zsim/spinor.hpp"

#include "json.hpp"

#include <cstdint>
#include <array>
#include <ostream>
#include <vector>

namespace zsim {

/// theta(x) = omega1 tau(x) with mc^2 (tau - tau0) = pi.x
struct PhaseField {
  FourVector pi = FourVector(1.0, 0.0, 0.0, 0.0);
  double tau0 = 0.0;
};

double proper_time_of(const FourVector& x, const PhaseField& phase);

struct WaveSample {
  FourVector x = FourVector::Zero();
  Spinor psi = Spinor::Zero();
  Spinor plus = Spinor::Zero();
  Spinor minus = Spinor::Zero();
};

WaveSample wave_function_at(const FourVector& x, const Spinor& a, const PhaseField& phase);

/// d psi / d x^mu from the chain rule: (pi_mu / mc^2)(-i/hbar) H psi. Column mu.
Eigen::Matrix4cd wave_gradient(const FourVector& x, const Spinor& a, const PhaseField& phase);
/// Central differences (psi(x + h e_mu) - psi(x - h e_mu)) / 2h.
Eigen::Matrix4cd wave_gradient_fd(const FourVector& x, const Spinor& a, const PhaseField& phase,
                                  double h);

struct ResidualPair {
  double analytic = 0;
  double finite_diff = 0;
};

/// max-norm of c gamma^mu (i hbar d_mu) psi - mc^2 psi
ResidualPair dirac_residual(const FourVector& x, const Spinor& a, const PhaseField& phase, double h);

struct KleinGordonResidual {
  double analytic = 0;
  double finite_diff = 0;
  /// finite-difference residual of each component separately
  std::array<double, 4> per_component{};
};

/// [d_mu d^mu + (mc/hbar)^2] psi
KleinGordonResidual klein_gordon_residual(const FourVector& x, const Spinor& a,
                                          const PhaseField& phase, double h);

/// Covariant psi-bar (i hbar d_mu) psi, which should equal pi_mu.
FourVector kinetic_momentum(const FourVector& x, const Spinor& a, const PhaseField& phase);

/// Finite-difference d_mu (psi-bar u^mu psi); zero for the free electron.
double continuity_divergence(const FourVector& x, const Spinor& a, const PhaseField& phase,
                             double h);

struct VelocityField {
  double u0 = 0;  // always c
  Vec3 velocity = Vec3::Zero();
  double density = 0;  // psi^* psi
};

/// U^mu = c u^mu / u^0. Throws std::domain_error when psi^* psi vanishes.
VelocityField velocity_field(const FourVector& x, const Spinor& a, const PhaseField& phase);

struct EnsembleConfig {
  std::int64_t count = 100000;
  double periods = 10.0;
  int steps_per_period = 50;
  int bins = 16;
  std::uint64_t seed = 1;
  /// Boost of the spin-up electron that defines the flow; along x^1.
  double speed = 0.6;
  /// Negative control: flips the time component of the oscillating part of u,
  /// which makes the flow compressible.
  bool corrupt = false;
  int jobs = 1;
};

struct DensityReport {
  int bins = 0;  // per axis
  std::vector<std::int64_t> counts;
  double chi2 = 0;
  int dof = 0;
  double p_value = 0;

  nlohmann::json to_json() const;
};

struct EnsembleReport {
  /// bins over (t, x^1, x^2) of the periodic box
  DensityReport spacetime;
  /// bins over (x^1, x^2, x^3) only
  DensityReport spatial;
  int shards = 0;
};

/// Uniform events in a periodic box (t, x^1, x^2, x^3), each advanced along
/// dx/dlambda = u(tau(x)) with RK4, then binned and tested with chi^2.
/// Results do not depend on `jobs`.
EnsembleReport ensemble_uniformity(const EnsembleConfig& cfg);

/// chi^2 uniformity test of integer counts.
DensityReport chi2_uniformity(int bins_per_axis, std::vector<std::int64_t> counts);

/// CSV rows x0..x3, Re/Im psi1..psi4.
void write_wave_grid(std::ostream& os, const std::vector<WaveSample>& samples);

}  // namespace zsim
