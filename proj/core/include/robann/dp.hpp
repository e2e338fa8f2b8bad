#pragma once

#include <cstdint>
#include <utility>

#include "robann/metric.hpp"
#include "robann/rng.hpp"

namespace robann {
namespace dp {

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;
  double sensitivity = 1.0;

  double lambda() const { return sensitivity / epsilon; }
  void validate() const;
};

// One Laplace(lambda) draw by inverse CDF:
// u ~ Uniform(-1/2, 1/2), return -lambda * sign(u) * ln(1 - 2|u|).
double laplace_sample(double lambda, RngStream& rng);

double laplace_cdf(double x, double lambda);

// Advanced adaptive composition of k (eps, delta)-DP mechanisms:
// eps_total = eps * sqrt(2k ln(1/delta')) + 2k eps^2, delta_total = k*delta + delta'.
std::pair<double, double> advanced_composition(double eps, double delta,
                                               std::uint64_t k,
                                               double delta_prime);

// Privacy amplification by subsampling m of n rows with replacement:
// eps' = 6 eps m / n, delta' = exp(6 eps m / n) * (4m/n) * delta.
// Requires n >= 2m.
std::pair<double, double> subsampling_amplification(double eps, double delta,
                                                    std::uint64_t m,
                                                    std::uint64_t n);

// Copy and subsample counts for the robust decider, with epsilon fixed at
// 0.01: L = ceil(2400 * ln(1/delta)^1.5 * sqrt(2Q)), k = ceil(40 ln(Q/delta)).
// "log" is read as natural log throughout.
struct DeciderConstants {
  std::uint64_t copies = 1;     // L
  std::uint64_t subsample = 1;  // k
  double epsilon = 0.01;
};

DeciderConstants decider_constants(const ProblemParams& params);

// The per-iteration privacy requirement behind the decider constants:
// subsampling k of L copies must give 6k/L < eps / (2 sqrt(2Q ln(1/delta))).
// Holds iff Q < 1/delta; exposed so tests and tools can evaluate it.
struct IterationPrivacyCheck {
  double lhs = 0.0;  // 6k/L
  double rhs = 0.0;  // eps'
  bool holds = false;
};

IterationPrivacyCheck iteration_privacy_check(double eps, std::uint64_t Q,
                                              double delta);

}  // namespace dp
}  // namespace robann
