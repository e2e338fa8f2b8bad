#include "robann/dp.hpp"

#include <cmath>
#include <stdexcept>

namespace robann {
namespace dp {

void PrivacyParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("require epsilon > 0");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("require delta in [0, 1]");
  }
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("require sensitivity > 0");
  }
}

double laplace_sample(double lambda, RngStream& rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("laplace: lambda <= 0");
  const double u = rng.next_double_open() - 0.5;  // in (-1/2, 1/2)
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return -lambda * sign * std::log(1.0 - 2.0 * std::abs(u));
}

double laplace_cdf(double x, double lambda) {
  if (x < 0.0) return 0.5 * std::exp(x / lambda);
  return 1.0 - 0.5 * std::exp(-x / lambda);
}

std::pair<double, double> advanced_composition(double eps, double delta,
                                               std::uint64_t k,
                                               double delta_prime) {
  if (!(eps >= 0.0) || !(delta >= 0.0) || k == 0) {
    throw std::invalid_argument("advanced_composition: bad arguments");
  }
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    throw std::invalid_argument("advanced_composition: delta' not in (0,1)");
  }
  const double kk = static_cast<double>(k);
  const double eps_total =
      eps * std::sqrt(2.0 * kk * std::log(1.0 / delta_prime)) +
      2.0 * kk * eps * eps;
  return {eps_total, kk * delta + delta_prime};
}

std::pair<double, double> subsampling_amplification(double eps, double delta,
                                                    std::uint64_t m,
                                                    std::uint64_t n) {
  if (n < 2 * m) {
    throw std::invalid_argument("subsampling_amplification: need n >= 2m");
  }
  const double ratio = static_cast<double>(m) / static_cast<double>(n);
  const double eps_out = 6.0 * eps * ratio;
  const double delta_out = std::exp(eps_out) * 4.0 * ratio * delta;
  return {eps_out, delta_out};
}

DeciderConstants decider_constants(const ProblemParams& params) {
  params.validate();
  DeciderConstants out;
  const double q = static_cast<double>(params.max_queries);
  const double log_inv_delta = std::log(1.0 / params.delta);
  const double copies = std::ceil(24.0 / out.epsilon *
                                  std::pow(log_inv_delta, 1.5) *
                                  std::sqrt(2.0 * q));
  out.copies = static_cast<std::uint64_t>(std::max(1.0, copies));
  const double sub = std::ceil(40.0 * std::log(q / params.delta));
  out.subsample = static_cast<std::uint64_t>(std::max(1.0, sub));
  return out;
}

IterationPrivacyCheck iteration_privacy_check(double eps, std::uint64_t Q,
                                              double delta) {
  IterationPrivacyCheck out;
  const double q = static_cast<double>(Q);
  const double log_inv_delta = std::log(1.0 / delta);
  const double k = std::log(q / delta);
  const double copies =
      24.0 / eps * std::pow(log_inv_delta, 1.5) * std::sqrt(2.0 * q);
  out.lhs = 6.0 * k / copies;
  out.rhs = eps / (2.0 * std::sqrt(2.0 * q * log_inv_delta));
  out.holds = out.lhs < out.rhs;
  return out;
}

}  // namespace dp
}  // namespace robann
