#include "simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace ftct::detail {
namespace {

constexpr double kEps = 1e-10;

struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // variables, excluding the rhs column
  std::vector<double> t;  // (rows + 1) x (cols + 1); last row is the cost row
  std::vector<std::size_t> basis;

  double& at(std::size_t r, std::size_t c) { return t[r * (cols + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  }

  // Runs Bland's rule on the cost row over columns [0, usable). Returns false
  // if the problem is unbounded.
  bool optimise(std::size_t usable) {
    for (;;) {
      std::size_t enter = usable;
      for (std::size_t c = 0; c < usable; ++c) {
        if (at(rows, c) < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter == usable) return true;
      std::size_t leave = rows;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        const double a = at(r, enter);
        if (a <= kEps) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - kEps ||
            (std::fabs(ratio - best) <= kEps && leave < rows &&
             basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == rows) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_standard_lp(const std::vector<std::vector<double>>& a,
                           const std::vector<double>& b,
                           const std::vector<double>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("lp: rhs size mismatch");
  for (const auto& row : a) {
    if (row.size() != n) throw std::invalid_argument("lp: row size mismatch");
  }

  Tableau tab;
  tab.rows = m;
  tab.cols = n + m;
  tab.t.assign((m + 1) * (n + m + 1), 0.0);
  tab.basis.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tab.at(r, j) = sign * a[r][j];
    tab.at(r, n + r) = 1.0;
    tab.rhs(r) = sign * b[r];
    tab.basis[r] = n + r;
  }
  // Phase 1 cost: sum of artificials, expressed in non-basic terms.
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j <= tab.cols; ++j) {
      if (j >= n && j < n + m) continue;
      tab.at(m, j) -= tab.at(r, j);
    }
  }
  tab.optimise(n + m);

  LpResult result;
  if (-tab.rhs(m) > 1e-8) return result;
  result.feasible = true;

  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(tab.at(r, j)) > kEps) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  // Phase 2 cost row.
  for (std::size_t j = 0; j <= tab.cols; ++j) tab.at(m, j) = 0.0;
  for (std::size_t j = 0; j < n; ++j) tab.at(m, j) = c[j];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bj = tab.basis[r];
    if (bj >= n) continue;  // redundant row, artificial stays at zero
    const double f = tab.at(m, bj);
    if (f == 0.0) continue;
    for (std::size_t j = 0; j <= tab.cols; ++j) tab.at(m, j) -= f * tab.at(r, j);
  }
  if (!tab.optimise(n)) {
    result.bounded = false;
    return result;
  }

  result.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis[r] < n) result.x[tab.basis[r]] = tab.rhs(r);
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace ftct::detail
