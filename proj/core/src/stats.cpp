#include "robann/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace robann {

double chi_square_sf(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dof),
                              0.5 * statistic);
}

ChiSquareReport chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  return chi_square_gof(
      counts, std::vector<double>(counts.size(), 1.0 / counts.size()));
}

ChiSquareReport chi_square_gof(const std::vector<std::uint64_t>& counts,
                               const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw std::invalid_argument("chi_square_gof: size mismatch");
  }
  ChiSquareReport rep;
  for (const auto c : counts) rep.total += c;
  if (rep.total == 0) throw std::invalid_argument("chi_square_gof: no data");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(rep.total);
    if (expected <= 0.0) {
      if (counts[i] != 0) {
        rep.statistic = std::numeric_limits<double>::infinity();
      }
      continue;
    }
    const double diff = static_cast<double>(counts[i]) - expected;
    rep.statistic += diff * diff / expected;
  }
  rep.dof = counts.size() - 1;
  rep.p_value = chi_square_sf(rep.statistic, rep.dof);
  return rep;
}

ChiSquareReport chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("chi_square_two_sample: size mismatch");
  }
  double ta = 0.0;
  double tb = 0.0;
  for (const auto v : a) ta += static_cast<double>(v);
  for (const auto v : b) tb += static_cast<double>(v);
  if (ta == 0.0 || tb == 0.0) {
    throw std::invalid_argument("chi_square_two_sample: empty sample");
  }
  const double ka = std::sqrt(tb / ta);
  const double kb = std::sqrt(ta / tb);
  ChiSquareReport rep;
  rep.total = static_cast<std::uint64_t>(ta + tb);
  std::size_t live = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = static_cast<double>(a[i]);
    const double bi = static_cast<double>(b[i]);
    if (ai + bi == 0.0) continue;
    ++live;
    const double diff = ka * ai - kb * bi;
    rep.statistic += diff * diff / (ai + bi);
  }
  rep.dof = live > 0 ? live - 1 : 0;
  rep.p_value = chi_square_sf(rep.statistic, rep.dof);
  return rep;
}

double ks_statistic(const std::vector<double>& cdf_at_sorted) {
  const std::size_t n = cdf_at_sorted.size();
  if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf_at_sorted[i];
    const double hi = static_cast<double>(i + 1) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    sup = std::max(sup, std::max(hi, lo));
  }
  return sup;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  WilsonInterval w;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  w.estimate = phat;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = phat + z2 / (2.0 * n);
  const double spread =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  w.low = std::max(0.0, (center - spread) / denom);
  w.high = std::min(1.0, (center + spread) / denom);
  return w;
}

}  // namespace robann
