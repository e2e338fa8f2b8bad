#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "robann/dp.hpp"
#include "robann/fair.hpp"
#include "robann/lsh.hpp"
#include "robann/metric.hpp"
#include "robann/rng.hpp"

namespace robann {

// Interface for the per-segment weak deciders so tests can force oracle
// behavior through the bucketing search.
class WeakDecider {
 public:
  virtual ~WeakDecider() = default;
  virtual int decide(const Point& q, RngStream& rng) = 0;
  // Point already lives in / is about to leave the segment dataset.
  virtual void on_insert(PointId id) = 0;
  virtual void on_erase(PointId id) = 0;
};

struct DeciderConfig {
  std::uint64_t copies = 0;     // L; 0 derives the paper constant
  std::uint64_t subsample = 0;  // k; 0 derives the paper constant
  double copy_miss = 0.1;       // per-copy miss target used to size tables
  double noise_scale = 1.0;     // scales Lap(1/k); 0 stubs the noise
  std::uint64_t max_tables = 100000;  // sanity cap per copy
};

// L independent oblivious LSH deciders combined privately: subsample k
// copies with replacement, N = fraction answering 1, output 1 iff
// N + Lap(1/k) > 1/2 (strict). Enforces the Q-query lifetime budget.
class RobustDecider : public WeakDecider {
 public:
  RobustDecider(std::shared_ptr<Dataset> ds, ProblemParams params,
                DeciderConfig cfg, std::uint64_t seed);

  int decide(const Point& q, RngStream& rng) override;

  PointId insert(const Point& pt);
  void erase(PointId id);
  void on_insert(PointId id) override;
  void on_erase(PointId id) override;

  std::uint64_t copies() const { return copies_.size(); }
  std::uint64_t subsample() const { return subsample_; }
  std::uint64_t queries_used() const { return queries_used_; }
  const AmplifiedLshIndex& copy(std::size_t i) const { return copies_[i]; }

 private:
  std::shared_ptr<Dataset> ds_;
  ProblemParams params_;
  DeciderConfig cfg_;
  std::uint64_t subsample_ = 1;
  std::uint64_t queries_used_ = 0;
  std::vector<AmplifiedLshIndex> copies_;
};

struct BucketedConfig {
  DeciderConfig decider;
  double alpha = 0.0;  // 0 derives 1/(2 - rho) from the actual LSH rho
};

// Search via weak decisions: the dataset is split by insertion order into
// kappa = ceil(n^(1-alpha)) segments of ceil(n^alpha) points, each guarded
// by a robust decider with failure budget delta/kappa. A query asks every
// segment in order and exhaustively scans each segment that answers 1,
// returning the first point within cr; segments that answer 1 but hold no
// cr-point are skipped in favor of later ones.
class BucketedIndex {
 public:
  using DeciderFactory = std::function<std::unique_ptr<WeakDecider>(
      std::shared_ptr<Dataset> segment, ProblemParams seg_params,
      std::uint64_t seed)>;

  BucketedIndex(std::shared_ptr<Dataset> master, ProblemParams params,
                BucketedConfig cfg, std::uint64_t seed,
                DeciderFactory factory = nullptr);

  std::optional<PointId> query(const Point& q, RngStream& rng);

  PointId insert(const Point& pt);  // routed to the smallest segment
  void erase(PointId id);

  std::size_t segment_count() const { return segments_.size(); }
  std::size_t segment_of(PointId master_id) const;
  double alpha() const { return alpha_; }
  std::uint64_t queries_used() const { return queries_used_; }

 private:
  struct Segment {
    std::shared_ptr<Dataset> data;
    std::unique_ptr<WeakDecider> decider;
    std::vector<PointId> master_ids;  // local id -> master id (dead ids stay)
  };

  std::shared_ptr<Dataset> master_;
  ProblemParams params_;
  double alpha_ = 0.5;
  std::uint64_t queries_used_ = 0;
  std::vector<Segment> segments_;
};

struct AnnuliConfig {
  std::uint32_t annuli = 2;  // k
  double eta = 0.001;
  double p_star = 0.998;   // flag threshold on the noisy estimate
  std::uint64_t pool = 0;  // testing instances per annulus; 0 derives m*L
  std::uint64_t probes = 0;  // s; 0 derives (2/eta) log(Qk/delta)
  double trunc_scale = 4.0;
  double noise_scale = 1.0;
  FairConfig fair;
  // Exponent used inside the truncation budget; kBitSampling reads the
  // actual rho from the per-annulus p1/p2 rather than an idealized formula.
  RhoFn trunc_rho = RhoFn::kBitSampling;
  std::uint64_t max_pool = 1000000;  // sanity cap on derived pool sizes
};

// Concentric-annuli search: annulus j in [0, k) holds fair instances for
// (c^(1/k), r_j)-ANN with r_j = c^(j/k) * r. A query probes s sampled
// testing instances per annulus under the truncation budget, releases the
// finish fraction through the Laplace mechanism, flags annuli with noisy
// estimate >= p_star, and runs the held-out execution instance of the first
// flagged annulus to completion.
class AnnuliIndex {
 public:
  AnnuliIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
              AnnuliConfig cfg, std::uint64_t seed);

  struct Result {
    std::optional<PointId> id;
    std::uint64_t charge = 0;
    std::vector<int> flags;           // a-hat per annulus
    std::vector<double> estimates;    // p-hat per annulus
    std::optional<std::size_t> ran;   // annulus whose execution instance ran
  };

  Result query(const Point& q, RngStream& rng);

  PointId insert(const Point& pt);  // updates every grid + execution instance
  void erase(PointId id);

  std::uint32_t annuli() const { return cfg_.annuli; }
  double radius(std::size_t j) const { return radii_[j]; }  // r_j
  std::uint64_t trunc_budget(std::size_t j) const;
  std::uint64_t pool_size() const { return pool_per_annulus_; }
  std::uint64_t probes() const { return probes_; }
  const FairIndex& execution(std::size_t j) const { return *exec_[j]; }
  const FairIndex& pool_instance(std::size_t j, std::size_t i) const {
    return pools_[j][i];
  }

 private:
  std::shared_ptr<Dataset> ds_;
  ProblemParams params_;
  AnnuliConfig cfg_;
  double c_prime_ = 1.0;
  std::uint64_t pool_per_annulus_ = 1;
  std::uint64_t probes_ = 1;
  std::uint64_t queries_used_ = 0;
  std::vector<double> radii_;  // r_0 .. r_k
  std::vector<std::vector<FairIndex>> pools_;
  std::vector<std::unique_ptr<FairIndex>> exec_;
};

struct RelaxedConfig {
  std::uint32_t annuli = 2;  // k
  double budget_scale = 100.0;
  FairConfig fair;
  RhoFn trunc_rho = RhoFn::kBitSampling;
};

// The DP-free warm-up: run the annulus instances in order, each under a
// charge budget of scale * n^max(rho(c'), 1/k), and return the first
// answer that finishes. A found point is uniform over the answering
// annulus's ball B(q, r_j).
class RelaxedFairAnnuli {
 public:
  RelaxedFairAnnuli(std::shared_ptr<Dataset> ds, ProblemParams params,
                    RelaxedConfig cfg, std::uint64_t seed);

  struct Result {
    QueryOutcome outcome = QueryOutcome::kNotFound;
    PointId id = 0;
    std::optional<std::size_t> annulus;  // instance that finished
    std::uint64_t charge = 0;
  };

  Result query(const Point& q, RngStream& rng) const;

  double radius(std::size_t j) const { return radii_[j]; }
  std::uint64_t budget(std::size_t j) const;
  const FairIndex& instance(std::size_t j) const { return instances_[j]; }

 private:
  std::shared_ptr<Dataset> ds_;
  ProblemParams params_;
  RelaxedConfig cfg_;
  double c_prime_ = 1.0;
  std::vector<double> radii_;
  std::vector<FairIndex> instances_;
};

// beta = min over integer k >= 1 of max(rho(c^(1/k)), 1/k), scanned over
// k in [1, 10 * ceil(log c / log log max(c, 3)) + 10].
struct ExponentReport {
  double c = 0.0;
  RhoFn rho_fn = RhoFn::kHammingOpt;
  std::uint32_t k_star = 1;   // minimizing integer annulus count
  double beta = 1.0;
  double crossover_k = 1.0;   // continuous solution of rho(c^(1/k)) = 1/k
  std::uint32_t k_max = 1;    // scanned upper bound
};

ExponentReport exponent_optimize(double c, RhoFn fn);

// Median-of-t amplification for the runtime release: run t independent
// copies, sort by charge, and report the median copy's charge and answer.
// t must be odd.
struct MedianRun {
  std::uint64_t charge = 0;
  std::optional<PointId> id;
};

struct MedianResult {
  std::uint64_t charge = 0;
  std::optional<PointId> id;
  std::size_t winner = 0;  // copy index whose run was the median
};

template <typename RunFn>
MedianResult median_of_runs(std::size_t t, RunFn&& run) {
  if (t == 0 || t % 2 == 0) {
    throw std::invalid_argument("median_of_runs: t must be odd");
  }
  std::vector<std::pair<MedianRun, std::size_t>> runs;
  runs.reserve(t);
  for (std::size_t i = 0; i < t; ++i) runs.emplace_back(run(i), i);
  std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
    return a.first.charge != b.first.charge ? a.first.charge < b.first.charge
                                            : a.second < b.second;
  });
  const auto& mid = runs[t / 2];
  return {mid.first.charge, mid.first.id, mid.second};
}

}  // namespace robann
