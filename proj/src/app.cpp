#include "zsim/app.hpp"

#include "zsim/dynamics.hpp"
#include "zsim/rng.hpp"
#include "zsim/spinstates.hpp"
#include "zsim/spintensor.hpp"
#include "zsim/trajectory_io.hpp"
#include "zsim/units.hpp"
#include "zsim/wavefield.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace zsim::app {

using namespace units;
namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& m) { return m.cwiseAbs().maxCoeff(); }

Scenario load(const Options& opts) {
  if (opts.scenario.empty()) throw UsageError("--scenario is required for this verb");
  Scenario sc = load_scenario(opts.scenario);
  if (opts.seed) sc.seed = *opts.seed;
  if (!(opts.tol_scale > 0.0)) throw UsageError("--tol-scale must be positive");
  sc.tol.scale(opts.tol_scale);
  return sc;
}

fs::path prepare_out(const Options& opts) {
  const fs::path dir = resolve_out_dir(opts);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

std::vector<Form> forms_of(const Scenario& sc) {
  if (!sc.forms.empty()) return sc.forms;
  return {Form::Position, Form::SpinTensor, Form::Spinor};
}

DynState make_initial(const Scenario& sc, Form form, double extra_phase = 0.0) {
  if (sc.initial.mode == InitialSpec::Mode::Raw) {
    const DynState raw = sc.initial.raw;
    if (sc.initial.validate) validate(raw);
    if (form == Form::Spinor)
      throw UsageError("raw 4-vector initial conditions cannot seed the spinor form; use mode = rest");
    if (form == Form::Position) return raw;
    const Kinematics k = kinematics(raw);
    return SpinTensorState{k.x, k.u, k.spin, k.pi};
  }
  RestFrameSpec spec = sc.initial.rest;
  spec.zbw_phase += extra_phase;
  DynState s = initial_state(spec, form, sc.field);
  if (sc.initial.validate) validate(s);
  return s;
}

IntegrationOptions integration_options(const Scenario& sc) {
  IntegrationOptions o;
  o.dt = sc.dt;
  o.tau_end = sc.tau_end;
  o.method = sc.method;
  o.record_every = sc.record_every;
  o.tolerance = sc.step_tolerance;
  return o;
}

/// Per-trajectory diagnostics.
Report diagnose(const Trajectory& traj, const Scenario& sc) {
  Report rep;
  ConstraintResiduals worst;
  double energy = 0, identities = 0, hnorm = 0;
  const bool free = is_free(sc.field);
  double oracle_x = 0, oracle_u = 0, scale_x = 0, scale_u = 0, j_drift = 0;
  const Kinematics k0 = kinematics(traj.samples.front().state);
  const Tensor4 j0 = angular_momentum(k0, FourVector::Zero()).total;

  for (const auto& s : traj.samples) {
    worst.c1 = std::max(worst.c1, std::abs(s.residuals.c1));
    worst.c2 = std::max(worst.c2, std::abs(s.residuals.c2));
    worst.c3 = std::max(worst.c3, std::abs(s.residuals.c3));
    worst.g = std::max(worst.g, std::abs(s.residuals.g));
    const Kinematics k = kinematics(s.state);
    const FieldSample f = field_at(sc.field, k.x);
    energy = std::max(energy, std::abs(energy_diagnostics(k, f, kCharge).energy_equation_residual));
    identities = std::max(identities, identity_suite(k).max());
    if (const auto* sp = std::get_if<SpinorState>(&s.state))
      hnorm = std::max(hnorm, std::abs(adjoint(sp->phi).sandwich(hamiltonian(sp->pi), sp->phi).real() -
                                        kRestEnergy));
    if (free) {
      const PositionState c = closed_form_free(k0.x, k0.u, k0.y(), k0.pi, s.tau);
      oracle_x = std::max(oracle_x, max_abs(k.x - c.x));
      oracle_u = std::max(oracle_u, max_abs(k.u - c.u));
      scale_x = std::max(scale_x, max_abs(c.x));
      scale_u = std::max(scale_u, max_abs(c.u));
      j_drift = std::max(j_drift, max_abs(angular_momentum(k, FourVector::Zero()).total - j0));
    }
  }
  rep.add("constraint.C1", worst.c1, sc.tol.constraints);
  rep.add("constraint.C2", worst.c2, sc.tol.constraints);
  rep.add("constraint.C3", worst.c3, sc.tol.constraints);
  rep.add("constraint.G", worst.g, sc.tol.constraints);
  rep.add("energy_equation", energy, sc.tol.energy);
  rep.add("identities", identities, sc.tol.identities);
  if (traj.form == Form::Spinor) rep.add("spinor.energy_normalization", hnorm, sc.tol.constraints);
  if (free) {
    rep.add("oracle.x_relative", scale_x > 0 ? oracle_x / scale_x : oracle_x, sc.tol.oracle);
    rep.add("oracle.u_relative", scale_u > 0 ? oracle_u / scale_u : oracle_u, sc.tol.oracle);
    rep.add("angular_momentum.J_drift", j_drift, sc.tol.conservation);
  }
  if (traj.samples.size() >= 5) {
    const FourthOrderReport fo = fourth_order_residual(traj, sc.field);
    rep.info("fourth_order.max_residual", fo.max_residual());
    const auto [lo, hi] = std::minmax_element(fo.lagrangian.begin(), fo.lagrangian.end());
    rep.info("lagrangian.min", *lo);
    rep.info("lagrangian.max", *hi);
  }
  if (const auto* u = std::get_if<UniformField>(&sc.field);
      u && u->magnetic.norm() > 0.0 && traj.samples.size() >= 3) {
    const GyrationReport g = measure_gyration(traj, u->magnetic, kCharge);
    if (std::isfinite(g.orbital_frequency)) rep.info("gyration.orbital_over_cyclotron", g.orbital_ratio());
    if (std::isfinite(g.spin_frequency)) rep.info("gyration.spin_over_half_cyclotron", g.spin_ratio());
  }
  rep.info("samples", static_cast<double>(traj.samples.size()));
  rep.info("tau_end", traj.samples.back().tau);
  rep.info("t_end", kinematics(traj.samples.back().state).x[0]);
  return rep;
}

nlohmann::ordered_json scenario_echo(const Scenario& sc, const Options& opts) {
  nlohmann::ordered_json j;
  j["name"] = sc.name;
  j["scenario_file"] = fs::path(opts.scenario).filename().string();
  j["seed"] = sc.seed;
  j["tol_scale"] = opts.tol_scale;
  return j;
}

void finish(const fs::path& dir, const std::string& stem, const nlohmann::ordered_json& body,
            const Report& rep, std::ostream& log) {
  nlohmann::ordered_json j = body;
  j["checks"] = rep.to_json();
  j["pass"] = rep.pass();
  write_json(dir / (stem + ".json"), j);
  std::ostringstream summary;
  rep.print(summary);
  summary << (rep.pass() ? "RESULT PASS\n" : "RESULT FAIL\n");
  write_file(dir / (stem + "_summary.txt"), summary.str());
  log << summary.str();
}

// ---- verify batteries -------------------------------------------------------

Vec3 random_direction(Rng& rng) {
  const double ct = rng.uniform(-1.0, 1.0);
  const double ph = rng.uniform(0.0, 2.0 * kPi);
  const double st = std::sqrt(1.0 - ct * ct);
  return {st * std::cos(ph), st * std::sin(ph), ct};
}

RestFrameSpec random_spec(Rng& rng, double max_speed) {
  RestFrameSpec s;
  s.theta = rng.uniform(0.0, kPi);
  s.phi = rng.uniform(0.0, 2.0 * kPi);
  s.zbw_phase = rng.uniform(0.0, 2.0 * kPi);
  s.velocity = rng.uniform(0.0, max_speed) * random_direction(rng);
  s.y0 = FourVector(0.0, rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
  return s;
}

Spinor random_normalized_amplitudes(Rng& rng, const BoostParams& boost) {
  Spinor a;
  for (int i = 0; i < 4; ++i) a[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  a.normalize();
  return spinor_boost(boost) * a;
}

void battery_identities(Report& rep, Rng& rng, const Tolerances& tol) {
  double ids = 0, routes = 0, salesi = 0, sd = 0;
  for (int i = 0; i < 200; ++i) {
    const DynState st = map_states(free_spinor_state(random_spec(rng, 0.9)), Form::Position);
    const Kinematics k = kinematics(st);
    ids = std::max(ids, identity_suite(k).max());
    const Tensor4 s1 = build_spin_tensor(k.z, k.u, kMass).matrix();
    salesi = std::max(salesi, max_abs(salesi_spin_tensor(k.udot, k.u, kMass).matrix() - s1) /
                                  max_abs(s1));
    sd = std::max({sd, max_abs(spin_from_motion(k.z, k.u, kMass) - k.spin.spin()),
                   max_abs(dipole_from_motion(k.z, k.u, kMass) - k.spin.dipole())});
    FieldSample f;
    f.electric = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    f.magnetic = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const DipoleReport d = interaction_energy(k, f, kCharge);
    routes = std::max(routes, d.route_spread() / std::max(1.0, std::abs(d.phi)));
  }
  rep.add("identities.random_boosted_states", ids, tol.analytic);
  rep.add("identities.salesi_form", salesi, tol.analytic);
  rep.add("identities.s_d_direct_formulas", sd, tol.analytic);
  rep.add("dipole.phi_routes", routes, tol.analytic);

  const Kinematics up = kinematics(map_states(free_spinor_state({}), Form::Position));
  FieldSample fb;
  fb.magnetic = Vec3(0, 0, 1e-3);
  const DipoleReport aligned = interaction_energy(up, fb, kCharge);
  rep.add("dipole.aligned_Um", std::abs(aligned.u_m - kHalfHbar * (1.0 / kMass) * 1e-3), tol.analytic);

  // Negative control: breaking C1 must break identity (i) too.
  PositionState broken = std::get<PositionState>(map_states(free_spinor_state({}), Form::Position));
  broken.u[0] *= 1.1;
  const Kinematics kb = kinematics(broken);
  rep.add("control.broken_C1.identity_i", identity_suite(kb).su, tol.analytic, true);
  rep.add("control.broken_C1.C1", std::abs(constraint_residuals(broken).c1), tol.analytic, true);
}

void battery_operators(Report& rep, Rng& rng, const Tolerances& tol) {
  double ops = 0, appb = 0;
  for (int i = 0; i < 100; ++i) {
    const BoostParams b = BoostParams::from_velocity(rng.uniform(0.0, 0.9) * random_direction(rng));
    const FourVector pi = boost_matrix(b) * FourVector(kMass * kLightSpeed, 0, 0, 0);
    ops = std::max(ops, operator_identity_suite(pi).max());
    const Spinor a = random_normalized_amplitudes(rng, b);
    appb = std::max(appb, appendixB_velocity(a, pi, rng.uniform(-10, 10)).residual());
  }
  rep.add("operators.identity_suite", ops, tol.operators);
  rep.add("operators.appendixB_velocity", appb, tol.analytic);
}

void battery_states(Report& rep, Rng& rng, const Tolerances& tol) {
  double geom = 0, super = 0, spin = 0, bilinear = 0;
  for (int i = 0; i < 100; ++i) {
    const SpinAxis axis = SpinAxis::from_vector(random_direction(rng));
    const double tau = rng.uniform(0.0, 10.0);
    const StateFunction st = spin_state(axis, tau);
    const RestObservables o = restframe_observables(rest_amplitudes(axis), tau);
    const FourVector udot = (4.0 / (kHbar * kHbar)) * spin_tensor_of(st.phi).contract_lower(
                                                          FourVector(1, 0, 0, 0));
    geom = std::max({geom, std::abs(spatial(o.u).dot(axis.n())),
                     std::abs(spatial(o.u).norm() - kLightSpeed),
                     std::abs(spatial(udot).norm() - kLightSpeed * kOmega0)});
    const Spinor sup = std::cos(0.5 * axis.theta()) * phi_up(axis.phi(), tau).phi +
                       std::sin(0.5 * axis.theta()) * phi_dn(axis.phi(), tau).phi;
    super = std::max(super, (sup - st.phi).cwiseAbs().maxCoeff());
    spin = std::max(spin, max_abs(o.s - kHalfHbar * axis.n()));
    bilinear = std::max(bilinear, max_abs(o.u - velocity_of(st.phi)));
  }
  rep.add("states.geometry", geom, tol.analytic);
  rep.add("states.superposition", super, 1e-14 * std::max(1.0, tol.analytic / 1e-10));
  rep.add("states.spin_vector", spin, tol.analytic);
  rep.add("states.rest_formulas_vs_bilinear", bilinear, tol.analytic);
}

void battery_wave(Report& rep, Rng& rng, const Tolerances& tol) {
  double dirac = 0, mom = 0, kg = 0, norm = 0;
  for (int i = 0; i < 1000; ++i) {
    const BoostParams b = BoostParams::from_velocity(rng.uniform(0.0, 0.9) * random_direction(rng));
    PhaseField ph;
    ph.pi = boost_matrix(b) * FourVector(kMass * kLightSpeed, 0, 0, 0);
    const Spinor a = random_normalized_amplitudes(rng, b);
    const FourVector x(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10),
                       rng.uniform(-10, 10));
    dirac = std::max(dirac, dirac_residual(x, a, ph, 1e-3).analytic);
    mom = std::max(mom, max_abs(kinetic_momentum(x, a, ph) - lower(ph.pi)));
    kg = std::max(kg, klein_gordon_residual(x, a, ph, 1e-3).analytic);
    const Spinor psi = wave_function_at(x, a, ph).psi;
    norm = std::max(norm, std::abs(adjoint(psi).sandwich(hamiltonian(ph.pi), psi).real() - kRestEnergy));
  }
  rep.add("wave.dirac_analytic", dirac, tol.analytic);
  rep.add("wave.kinetic_momentum", mom, tol.analytic);
  rep.add("wave.klein_gordon_analytic", kg, tol.analytic);
  rep.add("wave.normalization", norm, tol.analytic);
}

// ---- emit -------------------------------------------------------------------

using Extractor = std::function<double(const Sample&, const Kinematics&, const FieldSample&)>;

const std::map<std::string, Extractor>& derived_table() {
  static const std::map<std::string, Extractor> table = [] {
    std::map<std::string, Extractor> t;
    for (int i = 0; i < 3; ++i) {
      t["s" + std::to_string(i + 1)] = [i](const Sample&, const Kinematics& k, const FieldSample&) {
        return k.spin.spin()[i];
      };
      t["d" + std::to_string(i + 1)] = [i](const Sample&, const Kinematics& k, const FieldSample&) {
        return k.spin.dipole()[i];
      };
      t["z" + std::to_string(i + 1)] = [i](const Sample&, const Kinematics& k, const FieldSample&) {
        return k.z[i + 1];
      };
      t["J" + std::to_string(i + 1)] = [i](const Sample&, const Kinematics& k, const FieldSample&) {
        return angular_momentum(k, FourVector::Zero()).total3[i];
      };
    }
    t["E"] = [](const Sample&, const Kinematics& k, const FieldSample&) {
      return kLightSpeed * k.pi[0];
    };
    t["Phi"] = [](const Sample&, const Kinematics& k, const FieldSample& f) {
      return interaction_energy(k, f, kCharge).phi;
    };
    t["U_m"] = [](const Sample&, const Kinematics& k, const FieldSample& f) {
      return interaction_energy(k, f, kCharge).u_m;
    };
    t["U_e"] = [](const Sample&, const Kinematics& k, const FieldSample& f) {
      return interaction_energy(k, f, kCharge).u_e;
    };
    t["energy_residual"] = [](const Sample&, const Kinematics& k, const FieldSample& f) {
      return energy_diagnostics(k, f, kCharge).energy_equation_residual;
    };
    return t;
  }();
  return table;
}

std::vector<std::string> expand_quantities(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& q : in) {
    if (q == "residuals")
      out.insert(out.end(), {"C1", "C2", "C3", "G"});
    else if (q == "spin")
      out.insert(out.end(), {"s1", "s2", "s3"});
    else if (q == "energy")
      out.insert(out.end(), {"E", "Phi", "U_m", "U_e", "energy_residual"});
    else
      out.push_back(q);
  }
  return out;
}

}  // namespace

bool Check::pass() const {
  if (!tolerance) return true;
  if (!std::isfinite(value)) return false;
  return at_least ? value >= *tolerance : value <= *tolerance;
}

void Report::add(std::string name, double value, std::optional<double> tol, bool at_least) {
  checks_.push_back({std::move(name), value, tol, at_least});
}

bool Report::pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass(); });
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks_) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["value"] = c.value;
    if (c.tolerance) {
      j[c.at_least ? "minimum" : "tolerance"] = *c.tolerance;
      j["pass"] = c.pass();
    }
    arr.push_back(j);
  }
  return arr;
}

void Report::print(std::ostream& os, const std::string& prefix) const {
  for (const auto& c : checks_) {
    os << (c.tolerance ? (c.pass() ? "PASS " : "FAIL ") : "INFO ") << prefix << c.name << " = "
       << format_number(c.value);
    if (c.tolerance) os << (c.at_least ? " (>= " : " (<= ") << format_number(*c.tolerance) << ")";
    os << '\n';
  }
}

std::string resolve_out_dir(const Options& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv("ZSIM_OUT_DIR"); env && *env) return env;
  return "zsim_out";
}

int run(const Options& opts, std::ostream& log) {
  const Scenario sc = load(opts);
  const fs::path dir = prepare_out(opts);
  nlohmann::ordered_json body;
  body["scenario"] = scenario_echo(sc, opts);
  nlohmann::ordered_json per_form;
  Report all;
  for (Form f : forms_of(sc)) {
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = integrate(make_initial(sc, f), sc.field, integration_options(sc));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string name(form_name(f));
    if (sc.write_csv) {
      std::ostringstream os;
      write_trajectory_csv(os, traj);
      write_file(dir / ("trajectory_" + name + ".csv"), os.str());
    }
    if (sc.write_jsonl) {
      std::ostringstream os;
      write_trajectory_jsonl(os, traj);
      write_file(dir / ("trajectory_" + name + ".jsonl"), os.str());
    }
    const Report rep = diagnose(traj, sc);
    per_form[name] = rep.to_json();
    for (const auto& c : rep.checks()) all.add(name + "." + c.name, c.value, c.tolerance, c.at_least);
    // Wall time goes to the log only so artifacts stay byte-identical.
    log << "timing " << name << " " << secs << " s\n";
  }
  body["formulations"] = per_form;
  nlohmann::ordered_json j = body;
  j["pass"] = all.pass();
  write_json(dir / "diagnostics.json", j);
  std::ostringstream summary;
  all.print(summary);
  summary << (all.pass() ? "RESULT PASS\n" : "RESULT FAIL\n");
  write_file(dir / "summary.txt", summary.str());
  log << summary.str();
  return all.pass() ? kExitPass : kExitTolerance;
}

int verify(const Options& opts, std::ostream& log) {
  Tolerances tol;
  std::uint64_t seed = 1;
  if (!opts.scenario.empty()) {
    const Scenario sc = load(opts);
    tol = sc.tol;
    seed = sc.seed;
  } else {
    if (!(opts.tol_scale > 0.0)) throw UsageError("--tol-scale must be positive");
    tol.scale(opts.tol_scale);
    if (opts.seed) seed = *opts.seed;
  }
  // Stream ids are fixed so each suite sees the same draws whichever subset runs.
  static const std::map<std::string, std::pair<int, void (*)(Report&, Rng&, const Tolerances&)>> suites = {
      {"identities", {1, battery_identities}},
      {"operators", {2, battery_operators}},
      {"states", {3, battery_states}},
      {"wave", {4, battery_wave}}};
  std::vector<std::string> chosen;
  if (opts.suite == "all")
    for (const auto& [name, fn] : suites) chosen.push_back(name);
  else if (suites.count(opts.suite))
    chosen.push_back(opts.suite);
  else
    throw UsageError("unknown suite '" + opts.suite + "' (identities, operators, states, wave, all)");

  Report rep;
  for (const auto& name : chosen) {
    const auto& [stream, fn] = suites.at(name);
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(stream)));
    fn(rep, rng, tol);
  }
  nlohmann::ordered_json body;
  body["suite"] = opts.suite;
  body["seed"] = seed;
  finish(prepare_out(opts), "verify", body, rep, log);
  return rep.pass() ? kExitPass : kExitTolerance;
}

int compare(const Options& opts, std::ostream& log) {
  const Scenario sc = load(opts);
  const IntegrationOptions io = integration_options(sc);
  const bool free = is_free(sc.field);
  std::map<Form, Trajectory> runs;
  for (Form f : {Form::Position, Form::SpinTensor, Form::Spinor}) {
    if (f == Form::Spinor && sc.initial.mode == InitialSpec::Mode::Raw) continue;
    const double mismatch = f == Form::Position ? 0.0 : sc.compare_phase_mismatch;
    runs.emplace(f, integrate(make_initial(sc, f, mismatch), sc.field, io));
  }
  const double tol = free ? sc.tol.equivalence_free : sc.tol.equivalence_field;
  Report rep;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  auto pair = [&](Form a, Form b) {
    if (!runs.count(a) || !runs.count(b)) return;
    const Divergence d = compare_trajectories(runs.at(a), runs.at(b));
    const std::string name = std::string(form_name(a)) + "_vs_" + std::string(form_name(b));
    nlohmann::ordered_json row;
    row["pair"] = name;
    row["x"] = d.x;
    row["u"] = d.u;
    row["S"] = d.spin;
    row["pi"] = d.pi;
    table.push_back(row);
    rep.add(name, d.max(), tol);
  };
  pair(Form::Position, Form::SpinTensor);
  pair(Form::Spinor, Form::SpinTensor);
  pair(Form::Position, Form::Spinor);

  log << "pair                      x            u            S            pi\n";
  for (const auto& row : table) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %-12.3e %-12.3e %-12.3e %-12.3e\n",
                  row["pair"].get<std::string>().c_str(), row["x"].get<double>(),
                  row["u"].get<double>(), row["S"].get<double>(), row["pi"].get<double>());
    log << buf;
  }
  nlohmann::ordered_json body;
  body["scenario"] = scenario_echo(sc, opts);
  body["divergence"] = table;
  finish(prepare_out(opts), "compare", body, rep, log);
  return rep.pass() ? kExitPass : kExitTolerance;
}

std::vector<std::string> derived_quantities() {
  std::vector<std::string> out;
  for (const auto& [k, v] : derived_table()) out.push_back(k);
  return out;
}

int emit(const Options& opts, std::ostream& log) {
  if (opts.quantities.empty()) throw UsageError("emit needs at least one quantity name");
  FieldModel field = FreeField{};
  Trajectory traj;
  if (!opts.trajectory.empty()) {
    std::ifstream in(opts.trajectory);
    if (!in) throw UsageError("cannot open trajectory " + opts.trajectory);
    if (!opts.scenario.empty()) field = load(opts).field;
    traj = read_trajectory_csv(in);
  } else {
    const Scenario sc = load(opts);
    field = sc.field;
    traj = integrate(make_initial(sc, forms_of(sc).front()), sc.field, integration_options(sc));
  }
  const auto names = expand_quantities(opts.quantities);
  const auto cols = trajectory_columns(traj.form);
  const auto& table = derived_table();
  std::vector<std::function<double(const Sample&, const Kinematics&, const FieldSample&)>> getters;
  for (const auto& n : names) {
    const auto it = std::find(cols.begin(), cols.end(), n);
    if (it != cols.end()) {
      const auto idx = static_cast<std::size_t>(it - cols.begin());
      getters.push_back([idx](const Sample& s, const Kinematics&, const FieldSample&) {
        return trajectory_row(s)[idx];
      });
    } else if (table.count(n)) {
      getters.push_back(table.at(n));
    } else {
      throw UsageError("unknown quantity '" + n + "'");
    }
  }
  std::ostringstream os;
  os << "tau";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (const auto& s : traj.samples) {
    const Kinematics k = kinematics(s.state);
    const FieldSample f = field_at(field, k.x);
    os << format_number(s.tau);
    for (const auto& g : getters) os << ',' << format_number(g(s, k, f));
    os << '\n';
  }
  const fs::path dir = prepare_out(opts);
  write_file(dir / "emit.csv", os.str());
  log << "wrote " << (dir / "emit.csv").string() << " (" << traj.samples.size() << " rows)\n";
  return kExitPass;
}

int sample(const Options& opts, std::ostream& log) {
  const Scenario sc = load(opts);
  const SpinAxis axis = SpinAxis::from_angles(sc.sample.theta, sc.sample.phi);
  const double dn = sc.sample.device.norm();
  if (!(dn > 0.0)) throw UsageError("device axis must be non-zero");
  const SternGerlachTally t =
      sample_stern_gerlach(axis, sc.sample.device / dn, sc.sample.count, sc.seed, sc.sample.tau);
  Report rep;
  rep.add("malus.abs_z_score", std::abs(t.z_score), sc.tol.sample_sigma);
  rep.info("velocity.u1_mean_minus_input", t.sampled_mean_velocity[1] - t.input_velocity[1]);
  rep.info("velocity.u2_mean_minus_input", t.sampled_mean_velocity[2] - t.input_velocity[2]);
  rep.info("velocity.u3_mean_minus_input", t.sampled_mean_velocity[3] - t.input_velocity[3]);
  nlohmann::ordered_json body;
  body["scenario"] = scenario_echo(sc, opts);
  body["tally"] = t.to_json();
  finish(prepare_out(opts), "sample", body, rep, log);
  return rep.pass() ? kExitPass : kExitTolerance;
}

int ensemble(const Options& opts, std::ostream& log) {
  const Scenario sc = load(opts);
  EnsembleConfig cfg;
  cfg.count = sc.ensemble.count;
  cfg.periods = sc.ensemble.periods;
  cfg.steps_per_period = sc.ensemble.steps_per_period;
  cfg.bins = sc.ensemble.bins;
  cfg.speed = sc.ensemble.speed;
  cfg.corrupt = sc.ensemble.corrupt;
  cfg.seed = sc.seed;
  cfg.jobs = std::max(1, opts.jobs);
  const EnsembleReport er = ensemble_uniformity(cfg);
  Report rep;
  if (sc.ensemble.expect_uniform)
    rep.add("spacetime.p_value", er.spacetime.p_value, sc.tol.ensemble_alpha, true);
  else
    rep.add("control.spacetime.p_value", er.spacetime.p_value, sc.tol.ensemble_alpha);
  rep.info("spacetime.chi2", er.spacetime.chi2);
  rep.info("spatial.p_value", er.spatial.p_value);
  nlohmann::ordered_json body;
  body["scenario"] = scenario_echo(sc, opts);
  body["spacetime"] = er.spacetime.to_json();
  body["spatial"] = er.spatial.to_json();
  body["shards"] = er.shards;
  finish(prepare_out(opts), "ensemble", body, rep, log);
  return rep.pass() ? kExitPass : kExitTolerance;
}

int dispatch(const std::string& verb, const Options& opts, std::ostream& log, std::ostream& err) {
  static const std::map<std::string, int (*)(const Options&, std::ostream&)> verbs = {
      {"run", run},         {"verify", verify}, {"compare", compare},
      {"emit", emit},       {"sample", sample}, {"ensemble", ensemble}};
  const auto it = verbs.find(verb);
  if (it == verbs.end()) {
    err << "error: unknown verb '" << verb << "'\n";
    return kExitUsage;
  }
  try {
    return it->second(opts, log);
  } catch (const IntegrationError& e) {
    err << "integration aborted: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const FieldSingularity& e) {
    err << "integration aborted: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ConstraintViolation& e) {
    err << "initial state rejected: " << e.what() << '\n';
    for (const auto& f : e.failed()) err << "  " << f.name << " residual " << f.residual << '\n';
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace zsim::app
