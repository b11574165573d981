#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "experiment_config.hpp"

namespace ftct::cli {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

struct GcpOptions {
  std::string index_file;
  std::string failed_file;
  std::string out;
};

struct BoundsOptions {
  double lambda = 100.0;
  double kappa = 0.7;
  std::size_t d = 3;
  int n = 12;
  double t_n = 1.0;
  double t_n1 = 0.5;
  int m = 10;
  double c = 1.0 / 4096.0;
  std::optional<double> t_m;  // overrides c when set
  double seminorm = 1.0;
};

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out;
  std::size_t threads = 1;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  bool degenerate = false;  // fewer than two distinct x values
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ComparePoint {
  Strategy strategy;
  double lambda;
  std::size_t run;
  std::size_t faults;
  double wall_time;
};

struct CompareResult {
  std::vector<ComparePoint> points;
  std::vector<std::pair<Strategy, LineFit>> fits;
};

// Sweeps lambdas x strategies with config.runs repetitions each.
CompareResult run_compare(const ExperimentConfig& config, std::size_t threads);

// Each command writes to `out` unless an output path is given, reports
// problems on `err` and returns the process exit code.
int cmd_gcp(const GcpOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_compare(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_solve(const RunOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace ftct::cli
