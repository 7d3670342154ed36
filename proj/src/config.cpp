#include "zsim/config.hpp"

#include "zsim/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& file, int line, const std::string& field,
                         const std::string& msg)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " +
                         (field.empty() ? std::string() : field + ": ") + msg),
      line_(line),
      field_(field) {}

IniDocument IniDocument::parse(const std::string& text, const std::string& filename) {
  IniDocument doc;
  doc.filename_ = filename;
  std::istringstream is(text);
  std::string section;
  doc.sections_[section];
  int lineno = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++lineno;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(filename, lineno, "", "malformed section header");
      section = lower_case(trim(line.substr(1, line.size() - 2)));
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(filename, lineno, "", "expected 'key = value'");
    const std::string key = lower_case(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(filename, lineno, "", "empty key");
    auto& sec = doc.sections_[section];
    if (sec.count(key))
      throw ConfigError(filename, lineno, section + "." + key, "duplicate key");
    sec[key] = Entry{value, lineno, false};
  }
  return doc;
}

IniDocument IniDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.used = true;
  return &k->second;
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

void IniDocument::fail(const std::string& section, const std::string& key,
                       const std::string& msg) const {
  int line = 0;
  if (auto s = sections_.find(section); s != sections_.end())
    if (auto k = s->second.find(key); k != s->second.end()) line = k->second.line;
  throw ConfigError(filename_, line, section.empty() ? key : section + "." + key, msg);
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) {
  if (Entry* e = find(section, key)) return e->value;
  return std::nullopt;
}

double IniDocument::get_double(const std::string& section, const std::string& key,
                               double fallback) {
  const auto v = get(section, key);
  if (!v) return fallback;
  if (auto d = to_double(*v)) return *d;
  fail(section, key, "expected a number, got '" + *v + "'");
}

std::int64_t IniDocument::get_int(const std::string& section, const std::string& key,
                                  std::int64_t fallback) {
  const auto v = get(section, key);
  if (!v) return fallback;
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    fail(section, key, "expected an integer, got '" + *v + "'");
  return out;
}

bool IniDocument::get_bool(const std::string& section, const std::string& key, bool fallback) {
  const auto v = get(section, key);
  if (!v) return fallback;
  const std::string s = lower_case(*v);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  fail(section, key, "expected a boolean, got '" + *v + "'");
}

std::string IniDocument::get_string(const std::string& section, const std::string& key,
                                    const std::string& fallback) {
  const auto v = get(section, key);
  return v ? *v : fallback;
}

Vec3 IniDocument::get_vec3(const std::string& section, const std::string& key,
                           const Vec3& fallback) {
  const auto v = get(section, key);
  if (!v) return fallback;
  const auto parts = split_ws(*v);
  if (parts.size() != 3) fail(section, key, "expected three numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const auto d = to_double(parts[static_cast<std::size_t>(i)]);
    if (!d) fail(section, key, "expected three numbers");
    out[i] = *d;
  }
  return out;
}

FourVector IniDocument::get_four(const std::string& section, const std::string& key) {
  const auto v = get(section, key);
  if (!v) fail(section, key, "missing 4-vector");
  const auto parts = split_ws(*v);
  if (parts.size() != 4) fail(section, key, "expected four numbers");
  FourVector out;
  for (int i = 0; i < 4; ++i) {
    const auto d = to_double(parts[static_cast<std::size_t>(i)]);
    if (!d) fail(section, key, "expected four numbers");
    out[i] = *d;
  }
  return out;
}

void IniDocument::reject_unused() const {
  for (const auto& [sec, entries] : sections_)
    for (const auto& [key, e] : entries)
      if (!e.used)
        throw ConfigError(filename_, e.line, sec.empty() ? key : sec + "." + key, "unknown key");
}

void Tolerances::scale(double f) {
  for (double* t : {&constraints, &energy, &identities, &oracle, &conservation, &equivalence_free,
                    &equivalence_field, &analytic, &operators})
    *t *= f;
  sample_sigma *= f;
  ensemble_alpha /= f;
}

Scenario parse_scenario(IniDocument& doc) {
  Scenario sc;
  sc.name = doc.get_string("", "name", "");
  sc.name = doc.get_string("run", "name", sc.name);

  const std::string forms = lower_case(doc.get_string("run", "formulation", "all"));
  if (forms != "all") {
    for (const auto& w : split_ws(forms)) {
      const auto f = parse_form(w);
      if (!f) doc.fail("run", "formulation", "unknown formulation '" + w + "'");
      sc.forms.push_back(*f);
    }
  }
  const double periods = doc.get_double("run", "periods", 10.0);
  sc.tau_end = doc.get_double("run", "tau_end", periods * units::kZbwPeriod);
  const double steps_per_period = doc.get_double("run", "steps_per_period", 1000.0);
  sc.dt = doc.get_double("run", "dt", units::kZbwPeriod / steps_per_period);
  if (!(sc.dt > 0.0)) doc.fail("run", "dt", "must be positive");
  if (!(sc.tau_end >= 0.0)) doc.fail("run", "tau_end", "must be non-negative");
  const std::string method = lower_case(doc.get_string("run", "method", "rk4"));
  if (method == "rk4")
    sc.method = Method::Rk4;
  else if (method == "step_doubling" || method == "adaptive")
    sc.method = Method::StepDoubling;
  else
    doc.fail("run", "method", "expected rk4 or step_doubling");
  sc.step_tolerance = doc.get_double("run", "step_tolerance", sc.step_tolerance);
  sc.record_every = static_cast<int>(doc.get_int("run", "record_every", 1));
  if (sc.record_every < 1) doc.fail("run", "record_every", "must be >= 1");
  sc.seed = static_cast<std::uint64_t>(doc.get_int("run", "seed", 1));
  sc.compare_phase_mismatch = doc.get_double("run", "compare_phase_mismatch", 0.0);

  const std::string model = lower_case(doc.get_string("field", "model", "free"));
  if (model == "free") {
    sc.field = FreeField{};
  } else if (model == "uniform") {
    UniformField u;
    u.electric = doc.get_vec3("field", "electric", Vec3::Zero());
    u.magnetic = doc.get_vec3("field", "magnetic", Vec3::Zero());
    if (doc.has("field", "magnetic_tesla"))
      u.magnetic += doc.get_vec3("field", "magnetic_tesla", Vec3::Zero()) / units::si::kMagneticField;
    if (doc.has("field", "electric_volt_per_meter"))
      u.electric +=
          doc.get_vec3("field", "electric_volt_per_meter", Vec3::Zero()) / units::si::kElectricField;
    sc.field = u;
  } else if (model == "coulomb") {
    CoulombField c;
    c.strength = doc.get_double("field", "strength", 1.0);
    c.center = doc.get_vec3("field", "center", Vec3::Zero());
    sc.field = c;
  } else {
    doc.fail("field", "model", "expected free, uniform or coulomb");
  }

  const std::string mode = lower_case(doc.get_string("initial", "mode", "rest"));
  if (mode == "rest") {
    auto& r = sc.initial.rest;
    r.theta = doc.get_double("initial", "theta", 0.0);
    r.phi = doc.get_double("initial", "phi", 0.0);
    r.zbw_phase = doc.get_double("initial", "zbw_phase", 0.0);
    r.velocity = doc.get_vec3("initial", "velocity", Vec3::Zero());
    if (!(r.velocity.norm() < units::kLightSpeed))
      doc.fail("initial", "velocity", "speed must be below c");
    const Vec3 y0 = doc.get_vec3("initial", "spin_center", Vec3::Zero());
    r.y0 = make_four(0.0, y0);
  } else if (mode == "raw") {
    sc.initial.mode = InitialSpec::Mode::Raw;
    sc.initial.raw.x = doc.get_four("initial", "x");
    sc.initial.raw.u = doc.get_four("initial", "u");
    sc.initial.raw.y = doc.get_four("initial", "y");
    sc.initial.raw.pi = doc.get_four("initial", "pi");
  } else {
    doc.fail("initial", "mode", "expected rest or raw");
  }
  sc.initial.validate = doc.get_bool("initial", "validate", true);

  const std::string traj = lower_case(doc.get_string("output", "trajectory", "csv"));
  if (traj == "csv") {
    sc.write_csv = true;
    sc.write_jsonl = false;
  } else if (traj == "jsonl") {
    sc.write_csv = false;
    sc.write_jsonl = true;
  } else if (traj == "both") {
    sc.write_csv = sc.write_jsonl = true;
  } else if (traj == "none") {
    sc.write_csv = sc.write_jsonl = false;
  } else {
    doc.fail("output", "trajectory", "expected csv, jsonl, both or none");
  }

  auto& t = sc.tol;
  t.constraints = doc.get_double("tolerances", "constraints", t.constraints);
  t.energy = doc.get_double("tolerances", "energy", t.energy);
  t.identities = doc.get_double("tolerances", "identities", t.identities);
  t.oracle = doc.get_double("tolerances", "oracle", t.oracle);
  t.conservation = doc.get_double("tolerances", "conservation", t.conservation);
  t.equivalence_free = doc.get_double("tolerances", "equivalence_free", t.equivalence_free);
  t.equivalence_field = doc.get_double("tolerances", "equivalence_field", t.equivalence_field);
  t.analytic = doc.get_double("tolerances", "analytic", t.analytic);
  t.operators = doc.get_double("tolerances", "operators", t.operators);
  t.sample_sigma = doc.get_double("tolerances", "sample_sigma", t.sample_sigma);
  t.ensemble_alpha = doc.get_double("tolerances", "ensemble_alpha", t.ensemble_alpha);

  auto& s = sc.sample;
  s.theta = doc.get_double("sample", "theta", s.theta);
  s.phi = doc.get_double("sample", "phi", s.phi);
  s.device = doc.get_vec3("sample", "device", s.device);
  s.count = doc.get_int("sample", "count", s.count);
  s.tau = doc.get_double("sample", "tau", s.tau);
  if (s.count <= 0) doc.fail("sample", "count", "must be positive");

  auto& e = sc.ensemble;
  e.count = doc.get_int("ensemble", "count", e.count);
  e.periods = doc.get_double("ensemble", "periods", e.periods);
  e.steps_per_period = static_cast<int>(doc.get_int("ensemble", "steps_per_period", e.steps_per_period));
  e.bins = static_cast<int>(doc.get_int("ensemble", "bins", e.bins));
  e.speed = doc.get_double("ensemble", "speed", e.speed);
  e.corrupt = doc.get_bool("ensemble", "corrupt", e.corrupt);
  e.expect_uniform = doc.get_bool("ensemble", "expect_uniform", !e.corrupt);
  if (e.count <= 0) doc.fail("ensemble", "count", "must be positive");
  if (e.bins <= 0) doc.fail("ensemble", "bins", "must be positive");
  if (e.steps_per_period <= 0) doc.fail("ensemble", "steps_per_period", "must be positive");

  doc.reject_unused();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  IniDocument doc = IniDocument::load(path);
  return parse_scenario(doc);
}

}  // namespace zsim
