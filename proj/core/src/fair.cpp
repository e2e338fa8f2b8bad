#include "robann/fair.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace robann {

namespace {

LshParams fair_lsh_params(const ProblemParams& params, const Dataset& ds,
                          double boost_const, std::uint64_t seed) {
  const double n = static_cast<double>(std::max<std::size_t>(ds.size(), 2));
  const double boost =
      boost_const * std::log(n * static_cast<double>(params.max_queries));
  return derive_params(params, ds.size(), ds.dim(), std::max(1.0, boost),
                       seed);
}

}  // namespace

FairIndex::FairIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
                     std::uint64_t seed, FairConfig cfg)
    : params_(params),
      cfg_(cfg),
      index_(ds, params, fair_lsh_params(params, *ds, cfg.boost_const, seed)) {}

FairAnswer FairIndex::query(const Point& q, RngStream& rng,
                            WorkBudget* budget) const {
  const Dataset& ds = *index_.dataset();
  ds.check_compatible(q);
  FairAnswer ans;
  std::uint64_t local_spent = 0;
  const auto charge = [&](std::uint64_t units) {
    local_spent += units;
    if (budget != nullptr && !budget->charge(units)) {
      return false;
    }
    return true;
  };
  const auto finish = [&](QueryOutcome outcome, PointId id) {
    ans.outcome = outcome;
    ans.id = id;
    ans.charge = budget != nullptr ? budget->spent() : local_spent;
    return ans;
  };

  const std::uint32_t L = index_.lsh_params().L_tables;

  // Candidate multiset: every (table, bucket slot) colliding with q. One
  // charge per amplified-hash evaluation of q.
  std::vector<PointId> flat;
  std::unordered_map<PointId, std::uint32_t> mult;
  for (std::uint32_t t = 0; t < L; ++t) {
    if (!charge(1)) return finish(QueryOutcome::kTimeout, 0);
    if (const auto* b = index_.bucket(t, index_.key(t, q))) {
      for (const PointId id : *b) {
        flat.push_back(id);
        ++mult[id];
      }
    }
  }
  if (flat.empty()) return finish(QueryOutcome::kNotFound, 0);

  const double n = static_cast<double>(std::max<std::size_t>(ds.size(), 2));
  const double log_nq =
      std::max(1.0, std::log(n * static_cast<double>(params_.max_queries)));
  const std::uint64_t max_rejects = static_cast<std::uint64_t>(
      std::ceil(cfg_.reject_const * static_cast<double>(L) * log_nq));

  std::uint64_t rejects = 0;
  while (rejects <= max_rejects) {
    const PointId pick = flat[rng.next_below(flat.size())];
    if (!rng.next_bernoulli(1.0 / mult[pick])) {
      ++rejects;
      continue;
    }
    if (!charge(1)) return finish(QueryOutcome::kTimeout, 0);
    if (distance(ds.point(pick), q) <= params_.r) {
      return finish(QueryOutcome::kFound, pick);
    }
    ++rejects;
  }

  // Exhaustive fallback over the distinct candidates. Scanning order is
  // fixed (ascending id) and the final pick is uniform, so the conditional
  // output distribution matches the rejection-sampling path.
  std::vector<PointId> distinct;
  distinct.reserve(mult.size());
  for (const auto& [id, cnt] : mult) {
    (void)cnt;
    distinct.push_back(id);
  }
  std::sort(distinct.begin(), distinct.end());
  std::vector<PointId> in_ball;
  for (const PointId id : distinct) {
    if (!charge(1)) return finish(QueryOutcome::kTimeout, 0);
    if (distance(ds.point(id), q) <= params_.r) in_ball.push_back(id);
  }
  if (in_ball.empty()) return finish(QueryOutcome::kNotFound, 0);
  return finish(QueryOutcome::kFound, in_ball[rng.next_below(in_ball.size())]);
}

}  // namespace robann
