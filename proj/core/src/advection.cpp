#include "ftct/advection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ftct {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void sweep(ComponentGrid& g, std::size_t axis, double sigma,
           std::vector<double>& scratch) {
  const std::size_t points = g.points(axis);
  const std::size_t cells = points - 1;
  if (cells < 2) return;  // one periodic unknown: the sweep is the identity
  const std::size_t s = g.stride(axis);
  const std::size_t block = points * s;
  const std::size_t outer = g.size() / block;
  const double cm = 0.5 * sigma * (1.0 + sigma);
  const double c0 = 1.0 - sigma * sigma;
  const double cp = 0.5 * sigma * (sigma - 1.0);
  scratch.resize(block);
  auto v = g.values();
  for (std::size_t o = 0; o < outer; ++o) {
    double* u = v.data() + o * block;
    for (std::size_t m = 0; m < cells; ++m) {
      const double* left = u + (m == 0 ? cells - 1 : m - 1) * s;
      const double* mid = u + m * s;
      const double* right = u + (m + 1 == cells ? 0 : m + 1) * s;
      double* out = scratch.data() + m * s;
      for (std::size_t r = 0; r < s; ++r) {
        out[r] = cm * left[r] + c0 * mid[r] + cp * right[r];
      }
    }
    for (std::size_t r = 0; r < s; ++r) scratch[cells * s + r] = scratch[r];
    std::copy(scratch.begin(), scratch.end(), u);
  }
}

}  // namespace

AdvectionProblem default_problem(std::size_t d) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  AdvectionProblem p;
  p.velocity.assign(d, 1.0);
  p.initial = [](std::span<const double> x) {
    double v = std::sin(2.0 * kTwoPi * x[0]);
    for (std::size_t k = 1; k < x.size(); ++k) v *= std::sin(kTwoPi * x[k]);
    return v;
  };
  const std::vector<double> a = p.velocity;
  p.exact = [a](std::span<const double> x, double t) {
    double v = std::sin(2.0 * kTwoPi * (x[0] - a[0] * t));
    for (std::size_t k = 1; k < x.size(); ++k) {
      v *= std::sin(kTwoPi * (x[k] - a[k] * t));
    }
    return v;
  };
  return p;
}

double shared_timestep(std::size_t d, int n, int tau,
                       std::span<const double> velocity, double cfl) {
  if (d == 0 || velocity.size() != d) {
    throw std::invalid_argument("velocity must have d components");
  }
  if (tau < 0 || n < static_cast<int>(d) * tau) {
    throw std::invalid_argument("invalid band: n=" + std::to_string(n) +
                                " tau=" + std::to_string(tau));
  }
  if (!(cfl > 0.0 && cfl <= 1.0)) {
    throw std::invalid_argument("CFL factor must lie in (0, 1]");
  }
  double speed = 0.0;
  for (double a : velocity) speed += std::fabs(a);
  if (!(speed > 0.0)) throw std::invalid_argument("velocity must be nonzero");
  const int finest = n - (static_cast<int>(d) - 1) * tau;
  return cfl * std::ldexp(1.0, -finest) / speed;
}

void lax_wendroff_step(ComponentGrid& g, std::span<const double> velocity,
                       double dt) {
  if (velocity.size() != g.dim()) {
    throw std::invalid_argument("velocity must have d components");
  }
  std::vector<double> sigma(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    sigma[k] = velocity[k] * dt * std::ldexp(1.0, g.index()[k]);
    if (std::fabs(sigma[k]) > 1.0 + 1e-12) {
      throw std::invalid_argument("unstable time step on grid " +
                                  g.index().to_string());
    }
  }
  std::vector<double> scratch;
  for (std::size_t k = 0; k < g.dim(); ++k) sweep(g, k, sigma[k], scratch);
}

ComponentGrid lax_wendroff_step(const ComponentGrid& g,
                                std::span<const double> velocity, double dt) {
  ComponentGrid out = g;
  lax_wendroff_step(out, velocity, dt);
  return out;
}

EvolveResult evolve(const ComponentGrid& g, const AdvectionProblem& problem,
                    double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (t1 < t0) throw std::invalid_argument("cannot evolve backwards");
  const double ratio = (t1 - t0) / dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  EvolveResult r{g, t0, steps};
  for (std::size_t s = 0; s < steps; ++s) {
    lax_wendroff_step(r.grid, problem.velocity, dt);
  }
  r.time = t0 + static_cast<double>(steps) * dt;
  return r;
}

}  // namespace ftct
