#include "ftct/fault_model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftct {
namespace {

void require_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// (t / lambda)^kappa
double scaled(const WeibullFaults& model, double t) {
  return std::pow(t / model.lambda(), model.kappa());
}

}  // namespace

WeibullFaults::WeibullFaults(double lambda, double kappa)
    : lambda_(lambda), kappa_(kappa) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Weibull scale must be positive");
  }
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("Weibull shape must lie in (0, 1]");
  }
}

double WeibullFaults::mean() const {
  return lambda_ * std::tgamma(1.0 + 1.0 / kappa_);
}

double cdf(const WeibullFaults& model, double t) {
  require_time(t);
  return -std::expm1(-scaled(model, t));
}

double random_incidence_cdf(const WeibullFaults& model, double t) {
  require_time(t);
  // Exponential faults are memoryless.
  if (model.kappa() == 1.0) return cdf(model, t);
  // With u = (x/lambda)^kappa the integrand is u^{a-1} e^{-u} / Gamma(a),
  // a = 1/kappa. The further substitution u = w^p with p a >= 8 integral
  // removes the endpoint singularity: p w^{pa-1} e^{-w^p}.
  const double a = 1.0 / model.kappa();
  const double upper = scaled(model, t);
  if (upper == 0.0) return 0.0;
  const int power = static_cast<int>(std::ceil(8.0 * a)) - 1;
  const double p = (power + 1) / a;
  auto f = [p, power](double w) { return p * std::pow(w, power) * std::exp(-std::pow(w, p)); };
  const double norm = std::tgamma(a);
  // The integrand is negligible beyond u ~ 800 for any admissible shape.
  const double stop = std::pow(std::min(upper, 800.0), 1.0 / p);
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::
      integrate(f, 0.0, stop, 15, 1e-13, &error);
  return std::min(1.0, value / norm);
}

double long_run_fault_rate(const WeibullFaults& model) {
  return 1.0 / model.mean();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(mix_seed(seed, stream)) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double time_to_failure(const WeibullFaults& model, double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("uniform variate must lie in [0, 1)");
  }
  return model.lambda() * std::pow(-std::log1p(-u), 1.0 / model.kappa());
}

double sample_time_to_failure(const WeibullFaults& model, RandomStream& rng) {
  return time_to_failure(model, rng.uniform());
}

std::size_t count_failures(const WeibullFaults& model, RandomStream& rng,
                           double horizon) {
  require_time(horizon);
  std::size_t count = 0;
  double t = sample_time_to_failure(model, rng);
  while (t <= horizon) {
    ++count;
    t += sample_time_to_failure(model, rng);
  }
  return count;
}

double epsilon_n(std::size_t d, int n, double seminorm) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (n < 0) throw std::invalid_argument("level must be >= 0");
  if (!(seminorm >= 0.0)) throw std::invalid_argument("seminorm must be >= 0");
  const int dd = static_cast<int>(d);
  double sum = 0.0;
  for (int k = 0; k < dd; ++k) {
    sum += binomial(n + dd, k) * std::pow(3.0, -(dd - 1 - k));
  }
  return std::pow(3.0, -dd - 1) * std::ldexp(1.0, -2 * n) * seminorm * sum;
}

double expected_error_multiplier_one_layer(const WeibullFaults& model,
                                           double t_n) {
  return 1.0 + 3.0 * cdf(model, t_n);
}

double expected_error_multiplier_two_layer(const WeibullFaults& model,
                                           std::size_t d, double t_n,
                                           double t_n1) {
  require_time(t_n1);
  if (t_n < t_n1) throw std::invalid_argument("need t_n >= t_{n-1}");
  const double dd = static_cast<double>(d);
  const double bound = 1.0 + 3.0 * (dd + 5.0 - std::exp(-scaled(model, t_n)) -
                                    (dd + 4.0) * std::exp(-scaled(model, t_n1)));
  return std::min(16.0, bound);
}

double expected_recomputations(const WeibullFaults& model, double t) {
  require_time(t);
  const double s = scaled(model, t);
  return std::exp(s) * std::expm1(s);
}

double expected_recompute_ratio(const WeibullFaults& model, std::size_t d,
                                int m, int n, double c) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (n < 1 || m < 0 || m > n) throw std::invalid_argument("need 0 <= m <= n, n >= 1");
  if (!(c >= 0.0)) throw std::invalid_argument("cost scale must be >= 0");
  const double shape = std::pow(static_cast<double>(m) / n, static_cast<double>(d) - 1.0);
  return shape * std::ldexp(1.0, m - n) *
         expected_recomputations(model, c * std::ldexp(1.0, m));
}

double expected_recompute_ratio_full(const WeibullFaults& model, std::size_t d,
                                     int n, double c) {
  return expected_recompute_ratio(model, d, n, n, c);
}

double expected_recompute_ratio_from_time(const WeibullFaults& model,
                                          std::size_t d, int m, int n,
                                          double t_m) {
  require_time(t_m);
  return expected_recompute_ratio(model, d, m, n, std::ldexp(t_m, -m));
}

}  // namespace ftct
