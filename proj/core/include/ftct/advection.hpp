#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ftct/grid_fields.hpp"

namespace ftct {

// u_t + a . grad u = 0 on the periodic unit cube.
struct AdvectionProblem {
  std::vector<double> velocity;
  ScalarField initial;
  std::function<double(std::span<const double>, double)> exact;
};

// a = (1,...,1), u0 = sin(4 pi x_1) prod_{k>1} sin(2 pi x_k).
AdvectionProblem default_problem(std::size_t d = 3);

// cfl * 2^{-(n-(d-1)tau)} / sum |a_k|: stable on every grid of the band.
double shared_timestep(std::size_t d, int n, int tau,
                       std::span<const double> velocity, double cfl);

// One dimensionally split Lax-Wendroff step with periodic wraparound. The
// duplicated boundary layer is re-synchronised after each sweep. Throws
// std::invalid_argument if a Courant number exceeds 1.
void lax_wendroff_step(ComponentGrid& g, std::span<const double> velocity,
                       double dt);
ComponentGrid lax_wendroff_step(const ComponentGrid& g,
                                std::span<const double> velocity, double dt);

struct EvolveResult {
  ComponentGrid grid;
  double time = 0.0;
  std::size_t steps = 0;
};

// round((t1 - t0) / dt) steps of size dt.
EvolveResult evolve(const ComponentGrid& g, const AdvectionProblem& problem,
                    double t0, double t1, double dt);

}  // namespace ftct
