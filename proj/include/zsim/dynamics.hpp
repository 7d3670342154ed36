#pragma once

#include "zsim/emfield.hpp"
#include "zsim/minkowski.hpp"
#include "zsim/spinor.hpp"
#include "zsim/spintensor.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace zsim {

/// (x, u, y, pi): u = xdot is the total velocity, pi = m ydot the global momentum.
struct PositionState {
  FourVector x = FourVector::Zero();
  FourVector u = FourVector::Zero();
  FourVector y = FourVector::Zero();
  FourVector pi = FourVector::Zero();
};

struct SpinTensorState {
  FourVector x = FourVector::Zero();
  FourVector u = FourVector::Zero();
  SpinTensor spin;
  FourVector pi = FourVector::Zero();
};

struct SpinorState {
  FourVector x = FourVector::Zero();
  Spinor phi = Spinor::Zero();
  FourVector pi = FourVector::Zero();
};

using DynState = std::variant<PositionState, SpinTensorState, SpinorState>;

enum class Form { Position, SpinTensor, Spinor };

Form form_of(const DynState& s);
std::string_view form_name(Form f);
/// Accepts "position", "spintensor", "spinor".
std::optional<Form> parse_form(std::string_view name);

/// Derivatives are returned in the state's own layout.
PositionState deriv_position(const PositionState& s, const FieldModel& field);
SpinTensorState deriv_spintensor(const SpinTensorState& s, const FieldModel& field);
SpinorState deriv_spinor(const SpinorState& s, const FieldModel& field);

/// Uniform view of any formulation. In the spin-tensor and spinor forms z is
/// recovered from S pi = -(mc)^2 z.
Kinematics kinematics(const DynState& s);

struct ConstraintResiduals {
  double c1 = 0;  // u.u
  double c2 = 0;  // z.z + r0^2
  double c3 = 0;  // pi.u - mc^2
  double g = 0;   // z.pi

  double max_abs() const;
};

ConstraintResiduals constraint_residuals(const DynState& s);

/// Raised by validate(); `failed` names each violated constraint.
class ConstraintViolation : public std::runtime_error {
 public:
  struct Failure {
    std::string name;
    double residual;
  };
  explicit ConstraintViolation(std::vector<Failure> failed);
  const std::vector<Failure>& failed() const { return failed_; }

 private:
  std::vector<Failure> failed_;
};

/// Checks C1, C2, C3, G (and the energy normalization for spinor states).
void validate(const DynState& s, double tol = 1e-10);

enum class Method { Rk4, StepDoubling };

struct IntegrationOptions {
  double dt = 0.0;  // 0 selects T0/1000
  double tau_start = 0.0;
  double tau_end = 0.0;
  Method method = Method::Rk4;
  /// Record every n-th accepted step (the last step is always recorded).
  int record_every = 1;
  /// Local error tolerance for step doubling.
  double tolerance = 1e-12;
};

struct Sample {
  double tau = 0;
  DynState state;
  ConstraintResiduals residuals;
};

struct Trajectory {
  Form form = Form::Position;
  std::vector<Sample> samples;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double tau);
  double tau() const { return tau_; }

 private:
  double tau_;
};

Trajectory integrate(const DynState& initial, const FieldModel& field,
                     const IntegrationOptions& options);

/// Free motion: x(tau) = y0 + (pi/m) tau + z0 cos(w0 tau) + (zdot0/w0) sin(w0 tau).
PositionState closed_form_free(const FourVector& x0, const FourVector& u0, const FourVector& y0,
                               const FourVector& pi, double tau);

struct FourthOrderReport {
  std::vector<double> tau;
  /// max-norm of x'''' + w0^2 x'' - (q w0^2 / m) F x' at interior samples
  std::vector<double> residual;
  /// L = (m/2) u.u + q A.u - (m / 2 w0^2) udot.udot at every sample
  std::vector<double> lagrangian;

  double max_residual() const;
};

/// Needs at least five equally spaced samples. Derivatives are taken from the
/// recorded velocity (x'' and x'''' as first and third central differences of u),
/// which avoids the cancellation a fourth difference of x suffers at small steps.
FourthOrderReport fourth_order_residual(const Trajectory& traj, const FieldModel& field);

class UnsupportedMapping : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// State maps between formulations. Position/spin-tensor -> spinor is not constructible
/// in general and throws UnsupportedMapping; rest-frame specified states go
/// through initial_state() instead.
DynState map_states(const DynState& from, Form to, double tol = 1e-10);

/// Rest-frame description of a free electron: spin axis angles, an extra ZBW
/// phase advance, and the observer-frame velocity of the spin centre.
struct RestFrameSpec {
  double theta = 0.0;
  double phi = 0.0;
  double zbw_phase = 0.0;
  Vec3 velocity = Vec3::Zero();
  /// Spin-centre position at tau = 0.
  FourVector y0 = FourVector::Zero();
};

/// Free spinor state for the spec (boosted analytically), spin centre at y0.
SpinorState free_spinor_state(const RestFrameSpec& spec);

/// Rescales pi -> lambda pi and u -> u/lambda (S -> S/lambda, phi -> phi/sqrt(lambda))
/// so the energy equation pi.pi/m - mc^2 - Phi = 0 holds in `field`.
/// C1, C2, C3 and G are preserved by the scaling.
DynState settle_in_field(const DynState& s, const FieldModel& field);

/// Spec -> spinor -> settle -> map to `form`.
DynState initial_state(const RestFrameSpec& spec, Form form, const FieldModel& field);

/// Relative divergence max|a-b| / max|b| per variable group over matching samples.
struct Divergence {
  double x = 0;
  double u = 0;
  double spin = 0;
  double pi = 0;
  double max() const;
};

Divergence compare_trajectories(const Trajectory& a, const Trajectory& reference);

/// Rotation rates about a uniform magnetic field, measured in the spin-centre
/// time y^0 by least-squares fits of the unwrapped azimuths (in the plane
/// normal to B) of the spatial momentum and of the spin vector. A rate is NaN
/// when its vector has (almost) no component normal to B.
struct GyrationReport {
  double orbital_frequency = 0;
  double spin_frequency = 0;
  /// |q| |B| / (gamma m) with gamma the mean pi^0 / m
  double cyclotron_frequency = 0;
  double gamma = 1;

  double orbital_ratio() const { return orbital_frequency / cyclotron_frequency; }
  /// Spin rate over half the cyclotron rate.
  double spin_ratio() const { return spin_frequency / (0.5 * cyclotron_frequency); }
};

GyrationReport measure_gyration(const Trajectory& traj, const Vec3& magnetic, double charge);

}  // namespace zsim
