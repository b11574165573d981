#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftct/simulation.hpp"

namespace ftct::cli {

// One (n, tau) row of a simulate table.
struct Case {
  int n = 0;
  int tau = 0;
};

struct ExperimentConfig {
  SimConfig sim;
  std::vector<Case> cases;
  std::optional<double> lambda;  // none: no faults
  double kappa = 0.7;
  std::vector<double> lambdas;   // compare sweep
  std::vector<Strategy> strategies{Strategy::recombine,
                                   Strategy::local_checkpoint,
                                   Strategy::global_checkpoint};
  std::size_t runs = 1;
  std::optional<bool> solve;     // unset: command default
  std::string out;
};

// `key = value` lines, '#' comments. Unknown keys and malformed values throw
// ParseError. `n`/`tau` and `cases` are mutually exclusive.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Fills cases from the defaults when empty.
std::vector<Case> resolved_cases(const ExperimentConfig& config);

// SimConfig for one case with the fault model applied.
SimConfig case_config(const ExperimentConfig& config, const Case& c,
                      bool solve_default);

// "# key = value" lines describing every setting that affects the output.
// `compare` adds the sweep keys.
std::vector<std::string> header_lines(const ExperimentConfig& config,
                                      bool compare, bool solve_default);

std::string format_double(double v);

}  // namespace ftct::cli
