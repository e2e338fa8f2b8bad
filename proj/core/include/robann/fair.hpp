#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "robann/lsh.hpp"
#include "robann/metric.hpp"
#include "robann/rng.hpp"

namespace robann {

// Deterministic work meter standing in for wall-clock truncation: one charge
// unit per amplified-hash evaluation and one per candidate distance
// evaluation. spent never exceeds limit.
class WorkBudget {
 public:
  explicit WorkBudget(std::uint64_t limit) : limit_(limit) {}

  std::uint64_t limit() const { return limit_; }
  std::uint64_t spent() const { return spent_; }
  bool exhausted() const { return spent_ >= limit_; }

  // Charges up to `units`; returns false (and pins spent at limit) when the
  // budget runs out.
  bool charge(std::uint64_t units = 1) {
    if (limit_ - spent_ < units) {
      spent_ = limit_;
      return false;
    }
    spent_ += units;
    return true;
  }

 private:
  std::uint64_t limit_;
  std::uint64_t spent_ = 0;
};

enum class QueryOutcome { kFound, kNotFound, kTimeout };

struct FairAnswer {
  QueryOutcome outcome = QueryOutcome::kNotFound;
  PointId id = 0;            // valid when outcome == kFound
  std::uint64_t charge = 0;  // hash evals + candidate distance evals
};

struct FairConfig {
  double boost_const = 1.0;   // scales the log(nQ) table factor
  double reject_const = 100;  // exhaustive fallback after C*L*log(nQ) rejects
};

// Exact fair (c, r)-ANN sampler: on success returns an id uniform over
// B_S(q, r), using fresh per-query randomness only. The candidate multiset
// is sampled proportionally to bucket membership and accepted with
// probability 1/collision_count, which makes every distinct in-ball
// candidate equally likely; a final distance check keeps answers inside the
// r-ball unconditionally. After C*L*log(nQ) rejected rounds the sampler
// falls back to an exhaustive scan of the distinct candidates, which keeps
// the output distribution unchanged and certifies bottom.
class FairIndex {
 public:
  FairIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
            std::uint64_t seed, FairConfig cfg = {});

  FairAnswer query(const Point& q, RngStream& rng,
                   WorkBudget* budget = nullptr) const;

  PointId insert(const Point& pt) { return index_.insert(pt); }
  void erase(PointId id) { index_.erase(id); }

  // For composites whose instances share one dataset: hash an existing
  // dataset point in or out of this instance's tables only.
  void index_point(PointId id) { index_.index_point(id); }
  void unindex_point(PointId id) { index_.unindex_point(id); }

  const AmplifiedLshIndex& index() const { return index_; }
  const ProblemParams& problem() const { return params_; }
  const std::shared_ptr<Dataset>& dataset() const { return index_.dataset(); }

 private:
  ProblemParams params_;
  FairConfig cfg_;
  AmplifiedLshIndex index_;
};

}  // namespace robann
