#pragma once

#include <cstdint>
#include <vector>

namespace robann {

struct ChiSquareReport {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::uint64_t total = 0;
};

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double statistic, std::size_t dof);

// Goodness of fit of observed counts against a uniform distribution over
// the categories.
ChiSquareReport chi_square_uniform(const std::vector<std::uint64_t>& counts);

// Goodness of fit against arbitrary expected probabilities (sum to 1).
ChiSquareReport chi_square_gof(const std::vector<std::uint64_t>& counts,
                               const std::vector<double>& probs);

// Two-sample chi-square homogeneity test over shared categories. Categories
// empty in both samples are dropped from the degrees of freedom.
ChiSquareReport chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b);

// Kolmogorov-Smirnov statistic of samples against cdf values evaluated at
// the sorted samples: sup_i max(|i/n - F_i|, |(i-1)/n - F_i|).
// cdf_at_sorted must be the cdf evaluated at the samples in ascending order.
double ks_statistic(const std::vector<double>& cdf_at_sorted);

struct WilsonInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z = 1.96);

}  // namespace robann
