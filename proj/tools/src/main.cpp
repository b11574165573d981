#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_run_options(CLI::App* cmd, ftct::cli::RunOptions& opt) {
  cmd->add_option("--config", opt.config, "experiment config file")->required();
  cmd->add_option("--seed", opt.seed, "override the config seed");
  cmd->add_option("--runs", opt.runs, "override the number of runs");
  cmd->add_option("--out", opt.out, "write the table to this file");
  cmd->add_option("--threads", opt.threads, "worker threads (output is unchanged)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ftct::cli;
  CLI::App app{"Fault-tolerant sparse grid combination technique"};
  app.require_subcommand(1);

  GcpOptions gcp;
  auto* gcp_cmd = app.add_subcommand("gcp", "combination coefficients for an index set");
  gcp_cmd->add_option("index_set", gcp.index_file, "index set file")->required();
  gcp_cmd->add_option("--failed", gcp.failed_file, "indices lost to faults");
  gcp_cmd->add_option("--out", gcp.out, "write the plan to this file");

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "expected error and recompute bounds");
  bounds_cmd->add_option("--lambda", bounds.lambda, "Weibull scale")->capture_default_str();
  bounds_cmd->add_option("--kappa", bounds.kappa, "Weibull shape")->capture_default_str();
  bounds_cmd->add_option("-d,--dim", bounds.d, "dimension")->capture_default_str();
  bounds_cmd->add_option("-n,--level", bounds.n, "level")->capture_default_str();
  bounds_cmd->add_option("--tn", bounds.t_n, "top layer task time")->capture_default_str();
  bounds_cmd->add_option("--tn1", bounds.t_n1, "second layer task time")
      ->capture_default_str();
  bounds_cmd->add_option("-m", bounds.m, "recompute up to this level")
      ->capture_default_str();
  auto* c_opt = bounds_cmd->add_option("-c", bounds.c, "task time is c*2^level")
                    ->capture_default_str();
  bounds_cmd->add_option("--tm", bounds.t_m, "task time of a level-m grid")
      ->excludes(c_opt);
  bounds_cmd->add_option("--seminorm", bounds.seminorm, "mixed derivative seminorm")
      ->capture_default_str();

  RunOptions simulate, compare, solve;
  auto* simulate_cmd = app.add_subcommand("simulate", "fault-injected runs per case");
  add_run_options(simulate_cmd, simulate);
  auto* compare_cmd = app.add_subcommand("compare", "wall time against faults per strategy");
  add_run_options(compare_cmd, compare);
  auto* solve_cmd = app.add_subcommand("solve", "fault-free error and time per case");
  add_run_options(solve_cmd, solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (gcp_cmd->parsed()) return cmd_gcp(gcp, std::cout, std::cerr);
  if (bounds_cmd->parsed()) return cmd_bounds(bounds, std::cout, std::cerr);
  if (simulate_cmd->parsed()) return cmd_simulate(simulate, std::cout, std::cerr);
  if (compare_cmd->parsed()) return cmd_compare(compare, std::cout, std::cerr);
  return cmd_solve(solve, std::cout, std::cerr);
}
