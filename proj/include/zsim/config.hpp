#pragma once

#include "zsim/dynamics.hpp"
#include "zsim/emfield.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zsim {

/// Parse or validation problem in a scenario file, with its location.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& field, const std::string& msg);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// `key = value` lines grouped under `[section]` headers; `#` and `;` start comments.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  static IniDocument parse(const std::string& text, const std::string& filename = "<config>");
  static IniDocument load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double fallback);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  Vec3 get_vec3(const std::string& section, const std::string& key, const Vec3& fallback);
  FourVector get_four(const std::string& section, const std::string& key);

  /// Throws for any key that no getter consumed (catches typos).
  void reject_unused() const;
  const std::string& filename() const { return filename_; }
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& msg) const;

 private:
  std::string filename_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  Entry* find(const std::string& section, const std::string& key);
};

struct Tolerances {
  double constraints = 1e-8;
  double energy = 1e-8;
  double identities = 1e-8;
  double oracle = 1e-8;
  double conservation = 1e-8;
  double equivalence_free = 1e-6;
  double equivalence_field = 1e-5;
  double analytic = 1e-10;
  double operators = 1e-13;
  double sample_sigma = 3.0;
  double ensemble_alpha = 0.01;

  void scale(double factor);
};

struct InitialSpec {
  enum class Mode { Rest, Raw } mode = Mode::Rest;
  RestFrameSpec rest;
  /// Raw position-form vectors (x, u, y, pi).
  PositionState raw;
  bool validate = true;
};

struct SampleSpec {
  double theta = 0.0;
  double phi = 0.0;
  Vec3 device = Vec3(0, 0, 1);
  std::int64_t count = 100000;
  double tau = 0.0;
};

struct EnsembleSpec {
  std::int64_t count = 100000;
  double periods = 10.0;
  int steps_per_period = 50;
  int bins = 16;
  double speed = 0.6;
  bool corrupt = false;
  /// Whether the run should find the ensemble uniform (negative controls set false).
  bool expect_uniform = true;
};

struct Scenario {
  std::string name;
  /// Empty means "all three".
  std::vector<Form> forms;
  FieldModel field = FreeField{};
  InitialSpec initial;
  double tau_end = 0.0;
  double dt = 0.0;
  Method method = Method::Rk4;
  int record_every = 1;
  double step_tolerance = 1e-12;
  std::uint64_t seed = 1;
  bool write_csv = true;
  bool write_jsonl = false;
  /// Extra ZBW phase given to the spin-tensor and spinor runs in `compare`
  /// (negative control for the equivalence check).
  double compare_phase_mismatch = 0.0;
  Tolerances tol;
  SampleSpec sample;
  EnsembleSpec ensemble;
};

Scenario parse_scenario(IniDocument& doc);
Scenario load_scenario(const std::string& path);

}  // namespace zsim
