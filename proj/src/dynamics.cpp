#include "zsim/dynamics.hpp"

#include "zsim/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zsim {

using namespace units;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr Complex kI{0.0, 1.0};

FourVector force_on(const FieldModel& field, const FourVector& x, const FourVector& u) {
  if (is_free(field)) return FourVector::Zero();
  const FieldSample f = field_at(field, x);
  return tensor_force(kCharge, field_tensor(f.electric, f.magnetic), u);
}

// ---- flat layouts used by the integrators -------------------------------

template <class State>
struct Layout;

template <>
struct Layout<PositionState> {
  static constexpr int N = 16;
  using Vec = Eigen::Matrix<double, N, 1>;
  static Vec pack(const PositionState& s) {
    Vec v;
    v << s.x, s.u, s.y, s.pi;
    return v;
  }
  static PositionState unpack(const Vec& v) {
    return {v.segment<4>(0), v.segment<4>(4), v.segment<4>(8), v.segment<4>(12)};
  }
};

template <>
struct Layout<SpinTensorState> {
  static constexpr int N = 18;
  using Vec = Eigen::Matrix<double, N, 1>;
  // S01 S02 S03 S12 S13 S23
  static Vec pack(const SpinTensorState& s) {
    const Tensor4& m = s.spin.matrix();
    Vec v;
    v << s.x, s.u, m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3), s.pi;
    return v;
  }
  static SpinTensorState unpack(const Vec& v) {
    Tensor4 m = Tensor4::Zero();
    m(0, 1) = v[8];
    m(0, 2) = v[9];
    m(0, 3) = v[10];
    m(1, 2) = v[11];
    m(1, 3) = v[12];
    m(2, 3) = v[13];
    return {v.segment<4>(0), v.segment<4>(4), SpinTensor::from_matrix(m - m.transpose()) ,
            v.segment<4>(14)};
  }
};

template <>
struct Layout<SpinorState> {
  static constexpr int N = 16;
  using Vec = Eigen::Matrix<double, N, 1>;
  static Vec pack(const SpinorState& s) {
    Vec v;
    v.segment<4>(0) = s.x;
    for (int i = 0; i < 4; ++i) {
      v[4 + 2 * i] = s.phi[i].real();
      v[5 + 2 * i] = s.phi[i].imag();
    }
    v.segment<4>(12) = s.pi;
    return v;
  }
  static SpinorState unpack(const Vec& v) {
    SpinorState s;
    s.x = v.segment<4>(0);
    for (int i = 0; i < 4; ++i) s.phi[i] = Complex(v[4 + 2 * i], v[5 + 2 * i]);
    s.pi = v.segment<4>(12);
    return s;
  }
};

PositionState deriv(const PositionState& s, const FieldModel& f) { return deriv_position(s, f); }
SpinTensorState deriv(const SpinTensorState& s, const FieldModel& f) { return deriv_spintensor(s, f); }
SpinorState deriv(const SpinorState& s, const FieldModel& f) { return deriv_spinor(s, f); }

template <class State>
typename Layout<State>::Vec rhs(const typename Layout<State>::Vec& v, const FieldModel& field) {
  return Layout<State>::pack(deriv(Layout<State>::unpack(v), field));
}

template <class State>
typename Layout<State>::Vec rk4_step(const typename Layout<State>::Vec& y, double h,
                                     const FieldModel& field) {
  const auto k1 = rhs<State>(y, field);
  const auto k2 = rhs<State>(y + 0.5 * h * k1, field);
  const auto k3 = rhs<State>(y + 0.5 * h * k2, field);
  const auto k4 = rhs<State>(y + h * k3, field);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double observer_time_rate(const PositionState& s) { return s.u[0]; }
double observer_time_rate(const SpinTensorState& s) { return s.u[0]; }
double observer_time_rate(const SpinorState& s) { return s.phi.squaredNorm(); }

template <class State>
void check_step(const typename Layout<State>::Vec& prev, const typename Layout<State>::Vec& next,
                double tau) {
  if (!next.allFinite()) throw IntegrationError("state became non-finite", tau);
  if (!(next[0] > prev[0]) || !(observer_time_rate(Layout<State>::unpack(next)) > 0.0))
    throw IntegrationError("observer time stopped increasing", tau);
}

template <class State>
Trajectory run(const State& init, const FieldModel& field, const IntegrationOptions& opt,
               Form form) {
  using L = Layout<State>;
  Trajectory traj;
  traj.form = form;
  auto record = [&](double tau, const typename L::Vec& y) {
    DynState s = L::unpack(y);
    traj.samples.push_back({tau, s, constraint_residuals(s)});
  };

  const double span = opt.tau_end - opt.tau_start;
  typename L::Vec y = L::pack(init);
  record(opt.tau_start, y);
  if (span == 0.0) return traj;

  const double dt = opt.dt > 0.0 ? opt.dt : kZbwPeriod / 1000.0;
  const int every = std::max(1, opt.record_every);

  if (opt.method == Method::Rk4) {
    const auto steps = static_cast<long long>(std::ceil(span / dt * (1.0 - 1e-12)));
    traj.samples.reserve(static_cast<std::size_t>(steps / every + 2));
    for (long long k = 1; k <= steps; ++k) {
      const double tau_prev = opt.tau_start + static_cast<double>(k - 1) * dt;
      const double tau = k == steps ? opt.tau_end : opt.tau_start + static_cast<double>(k) * dt;
      const auto next = rk4_step<State>(y, tau - tau_prev, field);
      check_step<State>(y, next, tau);
      y = next;
      if (k % every == 0 || k == steps) record(tau, y);
    }
    return traj;
  }

  double tau = opt.tau_start;
  double h = dt;
  long long accepted = 0;
  while (tau < opt.tau_end) {
    const bool last = tau + h >= opt.tau_end * (1.0 - 1e-15) - 1e-300;
    const double step = last ? opt.tau_end - tau : h;
    const auto full = rk4_step<State>(y, step, field);
    const auto half = rk4_step<State>(rk4_step<State>(y, 0.5 * step, field), 0.5 * step, field);
    const double err = (half - full).cwiseAbs().maxCoeff() / (1.0 + half.cwiseAbs().maxCoeff());
    if (!std::isfinite(err)) throw IntegrationError("state became non-finite", tau + step);
    if (err <= opt.tolerance || step < 1e-14) {
      const typename L::Vec next = half + (half - full) / 15.0;
      check_step<State>(y, next, tau + step);
      y = next;
      tau = last ? opt.tau_end : tau + step;
      ++accepted;
      if (accepted % every == 0 || tau >= opt.tau_end) record(tau, y);
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(opt.tolerance / err, 0.2) : 2.0;
    h = step * std::clamp(factor, 0.2, 2.0);
  }
  return traj;
}

}  // namespace

Form form_of(const DynState& s) { return static_cast<Form>(s.index()); }

std::string_view form_name(Form f) {
  switch (f) {
    case Form::Position: return "position";
    case Form::SpinTensor: return "spintensor";
    case Form::Spinor: return "spinor";
  }
  return "unknown";
}

std::optional<Form> parse_form(std::string_view name) {
  for (Form f : {Form::Position, Form::SpinTensor, Form::Spinor})
    if (name == form_name(f)) return f;
  return std::nullopt;
}

PositionState deriv_position(const PositionState& s, const FieldModel& field) {
  return {s.u, -kOmega0 * kOmega0 * (s.x - s.y), s.pi / kMass, force_on(field, s.x, s.u)};
}

SpinTensorState deriv_spintensor(const SpinTensorState& s, const FieldModel& field) {
  SpinTensorState d;
  d.x = s.u;
  d.u = (4.0 * kLightSpeed * kLightSpeed / (kHbar * kHbar)) * s.spin.contract_lower(s.pi);
  d.spin = SpinTensor::from_matrix(2.0 * s.pi * s.u.transpose());
  d.pi = force_on(field, s.x, s.u);
  return d;
}

SpinorState deriv_spinor(const SpinorState& s, const FieldModel& field) {
  SpinorState d;
  d.x = velocity_of(s.phi);
  d.phi = (-kI / kHbar) * (hamiltonian(s.pi).m * s.phi);
  d.pi = force_on(field, s.x, d.x);
  return d;
}

Kinematics kinematics(const DynState& s) {
  const double k4 = 4.0 * kLightSpeed * kLightSpeed / (kHbar * kHbar);
  const double inv_mc_sq = 1.0 / (kMass * kLightSpeed * kMass * kLightSpeed);
  Kinematics k = std::visit(
      Overloaded{
          [&](const PositionState& p) {
            Kinematics r;
            r.x = p.x;
            r.u = p.u;
            r.pi = p.pi;
            r.z = p.x - p.y;
            r.spin = build_spin_tensor(r.z, p.u, kMass);
            r.udot = -kOmega0 * kOmega0 * r.z;
            return r;
          },
          [&](const SpinTensorState& p) {
            Kinematics r;
            r.x = p.x;
            r.u = p.u;
            r.pi = p.pi;
            r.spin = p.spin;
            r.z = -inv_mc_sq * p.spin.contract_lower(p.pi);
            r.udot = k4 * p.spin.contract_lower(p.pi);
            return r;
          },
          [&](const SpinorState& p) {
            Kinematics r;
            r.x = p.x;
            r.u = velocity_of(p.phi);
            r.pi = p.pi;
            r.spin = spin_tensor_of(p.phi);
            r.z = -inv_mc_sq * r.spin.contract_lower(p.pi);
            r.udot = k4 * r.spin.contract_lower(p.pi);
            return r;
          }},
      s);
  k.zdot = k.u - k.pi / kMass;
  return k;
}

double ConstraintResiduals::max_abs() const {
  return std::max({std::abs(c1), std::abs(c2), std::abs(c3), std::abs(g)});
}

ConstraintResiduals constraint_residuals(const DynState& s) {
  const Kinematics k = kinematics(s);
  ConstraintResiduals r;
  r.c1 = mdot(k.u, k.u);
  r.c2 = mdot(k.z, k.z) + kSpinRadius * kSpinRadius;
  r.c3 = mdot(k.pi, k.u) - kMass * kLightSpeed * kLightSpeed;
  r.g = mdot(k.z, k.pi);
  return r;
}

namespace {
std::string describe(const std::vector<ConstraintViolation::Failure>& failed) {
  std::ostringstream os;
  os << "constraint violation:";
  for (const auto& f : failed) os << ' ' << f.name << '=' << f.residual;
  return os.str();
}
}  // namespace

ConstraintViolation::ConstraintViolation(std::vector<Failure> failed)
    : std::runtime_error(describe(failed)), failed_(std::move(failed)) {}

void validate(const DynState& s, double tol) {
  std::vector<ConstraintViolation::Failure> failed;
  const ConstraintResiduals r = constraint_residuals(s);
  const std::pair<const char*, double> checks[] = {
      {"C1", r.c1}, {"C2", r.c2}, {"C3", r.c3}, {"G", r.g}};
  for (const auto& [name, v] : checks)
    if (!(std::abs(v) <= tol)) failed.push_back({name, v});
  if (const auto* sp = std::get_if<SpinorState>(&s)) {
    const double e = adjoint(sp->phi).sandwich(hamiltonian(sp->pi), sp->phi).real();
    if (!(std::abs(e - kRestEnergy) <= tol)) failed.push_back({"H", e - kRestEnergy});
  }
  if (!failed.empty()) throw ConstraintViolation(std::move(failed));
}

IntegrationError::IntegrationError(const std::string& what, double tau)
    : std::runtime_error(what + " at tau=" + std::to_string(tau)), tau_(tau) {}

Trajectory integrate(const DynState& initial, const FieldModel& field,
                     const IntegrationOptions& options) {
  if (!std::isfinite(options.tau_start) || !std::isfinite(options.tau_end) ||
      options.tau_end < options.tau_start)
    throw std::invalid_argument("tau span must be finite and non-decreasing");
  if (options.dt < 0.0 || !std::isfinite(options.dt))
    throw std::invalid_argument("dt must be positive");
  return std::visit(
      [&](const auto& s) { return run(s, field, options, form_of(initial)); }, initial);
}

PositionState closed_form_free(const FourVector& x0, const FourVector& u0, const FourVector& y0,
                               const FourVector& pi, double tau) {
  const FourVector drift = pi / kMass;
  const FourVector z0 = x0 - y0;
  const FourVector zdot0 = u0 - drift;
  const double c = std::cos(kOmega0 * tau);
  const double s = std::sin(kOmega0 * tau);
  PositionState out;
  out.y = y0 + drift * tau;
  out.x = out.y + z0 * c + zdot0 * (s / kOmega0);
  out.u = drift + zdot0 * c - z0 * (kOmega0 * s);
  out.pi = pi;
  return out;
}

double FourthOrderReport::max_residual() const {
  return residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
}

FourthOrderReport fourth_order_residual(const Trajectory& traj, const FieldModel& field) {
  const auto n = traj.samples.size();
  if (n < 5) throw std::invalid_argument("fourth_order_residual needs at least five samples");
  std::vector<Kinematics> kin;
  kin.reserve(n);
  for (const auto& s : traj.samples) kin.push_back(kinematics(s.state));
  const double h = traj.samples[1].tau - traj.samples[0].tau;
  for (std::size_t i = 1; i < n; ++i) {
    const double hi = traj.samples[i].tau - traj.samples[i - 1].tau;
    if (std::abs(hi - h) > 1e-9 * std::abs(h))
      throw std::invalid_argument("fourth_order_residual needs equally spaced samples");
  }

  FourthOrderReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    const Kinematics& k = kin[i];
    const FieldSample f = field_at(field, k.x);
    rep.lagrangian.push_back(0.5 * kMass * mdot(k.u, k.u) + kCharge * mdot(f.potential, k.u) -
                             kMass / (2.0 * kOmega0 * kOmega0) * mdot(k.udot, k.udot));
  }
  const double w2 = kOmega0 * kOmega0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const FourVector xdd = (kin[i + 1].u - kin[i - 1].u) / (2.0 * h);
    const FourVector x4 =
        (kin[i + 2].u - 2.0 * kin[i + 1].u + 2.0 * kin[i - 1].u - kin[i - 2].u) / (2.0 * h * h * h);
    const FieldSample f = field_at(field, kin[i].x);
    const FourVector coupling =
        (kCharge * w2 / kMass) * field_tensor(f.electric, f.magnetic) * lower(kin[i].u);
    rep.tau.push_back(traj.samples[i].tau);
    rep.residual.push_back((x4 + w2 * xdd - coupling).cwiseAbs().maxCoeff());
  }
  return rep;
}

DynState map_states(const DynState& from, Form to, double tol) {
  validate(from, tol);
  const Form src = form_of(from);
  if (src == to) return from;
  if (to == Form::Spinor)
    throw UnsupportedMapping("no general map from " + std::string(form_name(src)) +
                             " state to a spinor; build spinor states from a rest-frame spec");
  const Kinematics k = kinematics(from);
  if (to == Form::Position) return PositionState{k.x, k.u, k.x - k.z, k.pi};
  return SpinTensorState{k.x, k.u, k.spin, k.pi};
}

SpinorState free_spinor_state(const RestFrameSpec& spec) {
  const BoostParams boost = BoostParams::from_velocity(spec.velocity);
  // Rest amplitudes of the +hbar/2 eigenstate, advanced by the extra ZBW phase.
  const double c = std::cos(0.5 * spec.theta);
  const double s = std::sin(0.5 * spec.theta);
  const double hp = 0.5 * spec.phi;
  const double r = 1.0 / std::sqrt(2.0);
  const double w = 0.5 * spec.zbw_phase;  // omega1 tau with omega0 tau = zbw_phase
  Spinor a;
  a << r * std::polar(1.0, -hp - w) * c, r * std::polar(1.0, hp - w) * s,
      -r * std::polar(1.0, -hp + w) * s, r * std::polar(1.0, hp + w) * c;

  SpinorState out;
  out.phi = spinor_boost(boost) * a;
  const Tensor4 lambda = boost_matrix(boost);
  out.pi = lambda * FourVector(kMass * kLightSpeed, 0.0, 0.0, 0.0);
  const FourVector z = -(1.0 / (kMass * kLightSpeed * kMass * kLightSpeed)) *
                       spin_tensor_of(out.phi).contract_lower(out.pi);
  out.x = spec.y0 + z;
  return out;
}

DynState settle_in_field(const DynState& s, const FieldModel& field) {
  if (is_free(field)) return s;
  const Kinematics k = kinematics(s);
  const FieldSample f = field_at(field, k.x);
  const double phi1 = mdot(lorentz_force(kCharge, f.electric, f.magnetic, k.u), k.z) /
                      (kMass * kLightSpeed * kLightSpeed);
  // lambda^3 - lambda - Phi1 = 0, root nearest 1.
  double lambda = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double step = (lambda * lambda * lambda - lambda - phi1) / (3.0 * lambda * lambda - 1.0);
    lambda -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return std::visit(
      Overloaded{[&](PositionState p) -> DynState {
                   p.u /= lambda;
                   p.pi *= lambda;
                   return p;
                 },
                 [&](SpinTensorState p) -> DynState {
                   p.u /= lambda;
                   p.spin = (1.0 / lambda) * p.spin;
                   p.pi *= lambda;
                   return p;
                 },
                 [&](SpinorState p) -> DynState {
                   p.phi /= std::sqrt(lambda);
                   p.pi *= lambda;
                   return p;
                 }},
      s);
}

DynState initial_state(const RestFrameSpec& spec, Form form, const FieldModel& field) {
  const DynState settled = settle_in_field(free_spinor_state(spec), field);
  return map_states(settled, form);
}

double Divergence::max() const { return std::max({x, u, spin, pi}); }

Divergence compare_trajectories(const Trajectory& a, const Trajectory& reference) {
  if (a.samples.size() != reference.samples.size())
    throw std::invalid_argument("trajectories have different sample counts");
  double dx = 0, du = 0, ds = 0, dp = 0;
  double sx = 0, su = 0, ss = 0, sp = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (std::abs(a.samples[i].tau - reference.samples[i].tau) > 1e-9)
      throw std::invalid_argument("trajectories are sampled at different tau");
    const Kinematics ka = kinematics(a.samples[i].state);
    const Kinematics kb = kinematics(reference.samples[i].state);
    dx = std::max(dx, (ka.x - kb.x).cwiseAbs().maxCoeff());
    du = std::max(du, (ka.u - kb.u).cwiseAbs().maxCoeff());
    ds = std::max(ds, (ka.spin.matrix() - kb.spin.matrix()).cwiseAbs().maxCoeff());
    dp = std::max(dp, (ka.pi - kb.pi).cwiseAbs().maxCoeff());
    sx = std::max(sx, kb.x.cwiseAbs().maxCoeff());
    su = std::max(su, kb.u.cwiseAbs().maxCoeff());
    ss = std::max(ss, kb.spin.matrix().cwiseAbs().maxCoeff());
    sp = std::max(sp, kb.pi.cwiseAbs().maxCoeff());
  }
  auto rel = [](double d, double s) { return s > 0.0 ? d / s : d; };
  return {rel(dx, sx), rel(du, su), rel(ds, ss), rel(dp, sp)};
}

namespace {

/// Slope of the least-squares line through (t, unwrapped angle).
double angular_rate(const std::vector<double>& t, const std::vector<double>& angle) {
  std::vector<double> a(angle.size());
  double offset = 0;
  for (std::size_t i = 0; i < angle.size(); ++i) {
    if (i > 0) {
      const double jump = angle[i] - angle[i - 1];
      if (jump > kPi) offset -= 2 * kPi;
      if (jump < -kPi) offset += 2 * kPi;
    }
    a[i] = angle[i] + offset;
  }
  const double n = static_cast<double>(t.size());
  double st = 0, sa = 0, stt = 0, sta = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sa += a[i];
    stt += t[i] * t[i];
    sta += t[i] * a[i];
  }
  return (n * sta - st * sa) / (n * stt - st * st);
}

}  // namespace

GyrationReport measure_gyration(const Trajectory& traj, const Vec3& magnetic, double charge) {
  if (traj.samples.size() < 3) throw std::invalid_argument("measure_gyration needs at least three samples");
  const double b = magnetic.norm();
  if (!(b > 0.0)) throw std::invalid_argument("measure_gyration needs a nonzero magnetic field");
  const Vec3 e3 = magnetic / b;
  const Vec3 e1 = e3.unitOrthogonal();
  const Vec3 e2 = e3.cross(e1);
  std::vector<double> t, orbit, spin;
  double gamma_sum = 0, min_p = HUGE_VAL, min_s = HUGE_VAL;
  for (const Sample& s : traj.samples) {
    const Kinematics k = kinematics(s.state);
    const Vec3 p = spatial(k.pi);
    const Vec3 sv = k.spin.spin();
    min_p = std::min(min_p, std::hypot(p.dot(e1), p.dot(e2)) / k.pi[0]);
    min_s = std::min(min_s, std::hypot(sv.dot(e1), sv.dot(e2)) / kHalfHbar);
    t.push_back(k.y()[0]);
    orbit.push_back(std::atan2(p.dot(e2), p.dot(e1)));
    spin.push_back(std::atan2(sv.dot(e2), sv.dot(e1)));
    gamma_sum += k.pi[0] / kMass;
  }
  GyrationReport r;
  r.gamma = gamma_sum / static_cast<double>(traj.samples.size());
  // An azimuth is only meaningful when the projected vector stays clear of zero.
  constexpr double kMinTransverse = 1e-3;
  r.orbital_frequency = min_p > kMinTransverse ? std::abs(angular_rate(t, orbit)) : std::nan("");
  r.spin_frequency = min_s > kMinTransverse ? std::abs(angular_rate(t, spin)) : std::nan("");
  r.cyclotron_frequency = std::abs(charge) * b / (r.gamma * kMass);
  return r;
}

}  // namespace zsim
