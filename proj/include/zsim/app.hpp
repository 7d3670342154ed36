#pragma once

#include "zsim/config.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace zsim::app {

inline constexpr int kExitPass = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitUsage = 2;

struct Options {
  std::string scenario;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
  /// verify: identities | operators | states | wave | all
  std::string suite = "all";
  /// emit: quantity names and an optional trajectory CSV to read instead of running.
  std::vector<std::string> quantities;
  std::string trajectory;
};

/// One enabled check. Checks without a tolerance are informational.
struct Check {
  std::string name;
  double value = 0;
  std::optional<double> tolerance;
  /// When true the check passes if value >= tolerance (p-values, negative controls).
  bool at_least = false;

  bool pass() const;
};

class Report {
 public:
  void add(std::string name, double value, std::optional<double> tol, bool at_least = false);
  void info(std::string name, double value) { add(std::move(name), value, std::nullopt); }
  bool pass() const;
  const std::vector<Check>& checks() const { return checks_; }
  nlohmann::ordered_json to_json() const;
  void print(std::ostream& os, const std::string& prefix = "") const;

 private:
  std::vector<Check> checks_;
};

/// Output directory: --out, else $ZSIM_OUT_DIR, else ./zsim_out.
std::string resolve_out_dir(const Options& opts);

int run(const Options& opts, std::ostream& log);
int verify(const Options& opts, std::ostream& log);
int compare(const Options& opts, std::ostream& log);
int emit(const Options& opts, std::ostream& log);
int sample(const Options& opts, std::ostream& log);
int ensemble(const Options& opts, std::ostream& log);

/// Dispatches by verb and maps configuration and usage errors to exit code 2.
int dispatch(const std::string& verb, const Options& opts, std::ostream& log, std::ostream& err);

/// Quantity names accepted by `emit`, besides the trajectory columns.
std::vector<std::string> derived_quantities();

}  // namespace zsim::app
