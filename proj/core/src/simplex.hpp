#pragma once

#include <vector>

namespace ftct::detail {

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase simplex with Bland's rule:
// minimise c^T x subject to A x = b, x >= 0.
LpResult solve_standard_lp(const std::vector<std::vector<double>>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& c);

}  // namespace ftct::detail
