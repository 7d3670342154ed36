#include "zsim/app.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App cli{"zsim: neo-classical spinning electron simulator"};
  cli.require_subcommand(1);
  zsim::app::Options opts;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opts.scenario, "scenario file (key = value with [sections])");
    sub->add_option("--out", opts.out_dir, "output directory (default $ZSIM_OUT_DIR, else ./zsim_out)");
    sub->add_option("--jobs", opts.jobs, "worker threads for ensemble shards")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--tol-scale", opts.tol_scale, "multiply every tolerance by this factor");
  };

  auto* run = cli.add_subcommand("run", "integrate the scenario and write trajectories + diagnostics");
  common(run);
  auto* verify = cli.add_subcommand("verify", "analytic identity batteries");
  common(verify);
  verify->add_option("--suite", opts.suite, "identities | operators | states | wave | all");
  auto* compare = cli.add_subcommand("compare", "run all three formulations from mapped initial conditions");
  common(compare);
  auto* emit = cli.add_subcommand("emit", "write selected quantities as a tidy CSV");
  common(emit);
  emit->add_option("--trajectory", opts.trajectory, "trajectory CSV from `run` (otherwise the scenario is run)");
  emit->add_option("quantities", opts.quantities, "column or derived quantity names")->required();
  auto* sample = cli.add_subcommand("sample", "Stern-Gerlach outcome sampling");
  common(sample);
  auto* ensemble = cli.add_subcommand("ensemble", "Liouville uniformity check");
  common(ensemble);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return zsim::app::kExitUsage;
  }

  for (auto* sub : {run, verify, compare, emit, sample, ensemble}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) opts.seed = seed;
    return zsim::app::dispatch(sub->get_name(), opts, std::cout, std::cerr);
  }
  return zsim::app::kExitUsage;
}
