#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ftct {

// Weibull time-to-failure distribution with scale lambda (seconds) and shape
// 0 < kappa <= 1. Other shapes are rejected.
class WeibullFaults {
 public:
  WeibullFaults(double lambda, double kappa);

  double lambda() const { return lambda_; }
  double kappa() const { return kappa_; }

  // lambda * Gamma(1 + 1/kappa)
  double mean() const;

 private:
  double lambda_;
  double kappa_;
};

// F(t) = 1 - exp(-(t/lambda)^kappa). Throws std::invalid_argument for t < 0.
double cdf(const WeibullFaults& model, double t);

// Residual-lifetime distribution G(t) of a renewal process observed at a
// random time, integrated to an absolute accuracy of 1e-10.
double random_incidence_cdf(const WeibullFaults& model, double t);

double long_run_fault_rate(const WeibullFaults& model);

// Reproducible generator for one (seed, stream) pair.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Inverse transform: lambda * (-log(1 - u))^{1/kappa}.
double time_to_failure(const WeibullFaults& model, double u);
double sample_time_to_failure(const WeibullFaults& model, RandomStream& rng);

// Renewals in (0, horizon] of a process started fresh at time 0.
std::size_t count_failures(const WeibullFaults& model, RandomStream& rng,
                           double horizon);

// Interpolation error bound for level n sparse grids in d dimensions, given
// the mixed seminorm of the target.
double epsilon_n(std::size_t d, int n, double seminorm);

// Bound on the expected error relative to eps_n when failed top-layer grids
// are dropped.
double expected_error_multiplier_one_layer(const WeibullFaults& model,
                                           double t_n);
// Same when the top two layers may be dropped; requires t_n >= t_{n-1} >= 0.
double expected_error_multiplier_two_layer(const WeibullFaults& model,
                                           std::size_t d, double t_n,
                                           double t_n1);

// Expected recomputation overhead factor e^s (e^s - 1), s = (t/lambda)^kappa,
// for a task of duration t.
double expected_recomputations(const WeibullFaults& model, double t);

// Estimated share of extra time spent recomputing grids up to level m when
// computing up to level n, with task time c * 2^level.
double expected_recompute_ratio(const WeibullFaults& model, std::size_t d,
                                int m, int n, double c);
// Recompute every failed grid (m = n).
double expected_recompute_ratio_full(const WeibullFaults& model, std::size_t d,
                                     int n, double c);
// Parameterised by the time t_m of one level-m grid instead of c.
double expected_recompute_ratio_from_time(const WeibullFaults& model,
                                          std::size_t d, int m, int n,
                                          double t_m);

}  // namespace ftct
