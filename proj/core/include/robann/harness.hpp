#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robann/fair.hpp"
#include "robann/metric.hpp"
#include "robann/rng.hpp"
#include "robann/robust.hpp"
#include "robann/stats.hpp"

namespace robann {

struct HarnessAnswer {
  enum class Kind { kPoint, kBottom, kBit };
  Kind kind = Kind::kBottom;
  PointId id = 0;
  int bit = 0;
  std::uint64_t charge = 0;

  static HarnessAnswer point(PointId id, std::uint64_t charge = 0) {
    return {Kind::kPoint, id, 0, charge};
  }
  static HarnessAnswer bottom(std::uint64_t charge = 0) {
    return {Kind::kBottom, 0, 0, charge};
  }
  static HarnessAnswer decision(int bit, std::uint64_t charge = 0) {
    return {Kind::kBit, 0, bit, charge};
  }
  std::string to_string() const;
};

// Structure under test. Answer randomness comes only from the per-round
// stream the harness hands in.
class Searcher {
 public:
  virtual ~Searcher() = default;
  virtual HarnessAnswer query(const Point& q, RngStream& rng) = 0;
  virtual void apply_insert(const Point& pt);  // default: unsupported
  virtual void apply_erase(PointId id);
};

struct GameRound {
  Point query;
  HarnessAnswer answer;
  bool correct = true;
};

// The strategy interface deliberately exposes only the public view: the
// transcript so far, the problem parameters, and the dataset contents.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual Point next_query(const std::vector<GameRound>& history,
                           const ProblemParams& params,
                           const Dataset& data) = 0;
};

struct UpdateOp {
  std::uint64_t after_round = 0;  // 0 applies before round 1
  bool is_insert = true;
  Point pt;        // insert payload
  PointId id = 0;  // erase target
};

struct Transcript {
  std::vector<GameRound> rounds;
  bool adversary_won = false;
  std::uint64_t first_failure_round = 0;  // 1-based, 0 when none
  std::uint64_t total_charge = 0;

  std::string to_tsv() const;  // round, query, answer, verdict, charge
};

struct GameOptions {
  std::uint64_t rounds = 1;  // Q
  std::uint64_t seed = 0;    // master seed for per-round query streams
  std::uint64_t game_ordinal = 0;
  std::vector<UpdateOp> schedule;  // fixed before round 1
};

RngStream round_stream(std::uint64_t seed, std::uint64_t game,
                       std::uint64_t round);

// One adversarial game: per round the adversary picks a query from the
// history, the searcher answers with a fresh stream, and the answer is
// judged against the oracle on the current dataset state. Scheduled updates
// apply between rounds through the searcher so structure and oracle stay in
// sync. Structure errors propagate.
Transcript run_game(const std::shared_ptr<Dataset>& ds,
                    const ProblemParams& params, Searcher& searcher,
                    Adversary& adversary, const GameOptions& opt);

// --- concrete adversaries ---------------------------------------------

// Baseline: queries independent of the history.
class ObliviousRandomAdversary : public Adversary {
 public:
  explicit ObliviousRandomAdversary(std::uint64_t seed) : seed_(seed) {}
  Point next_query(const std::vector<GameRound>& history,
                   const ProblemParams& params, const Dataset& data) override;

 private:
  std::uint64_t seed_;
  std::uint64_t issued_ = 0;
};

// Re-issues queries near previously answered points to correlate with the
// structure's internal randomness.
class RepeatPerturbAdversary : public Adversary {
 public:
  explicit RepeatPerturbAdversary(std::uint64_t seed) : seed_(seed) {}
  Point next_query(const std::vector<GameRound>& history,
                   const ProblemParams& params, const Dataset& data) override;

 private:
  std::uint64_t seed_;
  std::uint64_t issued_ = 0;
};

// Sweeps single-bit flips of an isolated base point to detect which
// coordinates a bit-sampling index probes (a missed answer on a distance-1
// query exposes a sampled coordinate), then replays a crafted query that
// collides with far points only. Defeats an unprotected single-table
// index; learns nothing from a fair sampler.
class BucketProberAdversary : public Adversary {
 public:
  explicit BucketProberAdversary(std::uint64_t seed) : seed_(seed) {}
  Point next_query(const std::vector<GameRound>& history,
                   const ProblemParams& params, const Dataset& data) override;

 private:
  std::uint64_t seed_;
  std::uint64_t issued_ = 0;
  std::optional<std::size_t> learned_coord_;
};

// Replays the historically worst-performing query; probes alternate
// near-positive and far-negative perturbations of dataset points until a
// wrong answer shows up.
class ReplayWorstAdversary : public Adversary {
 public:
  explicit ReplayWorstAdversary(std::uint64_t seed) : seed_(seed) {}
  Point next_query(const std::vector<GameRound>& history,
                   const ProblemParams& params, const Dataset& data) override;

 private:
  std::uint64_t seed_;
  std::uint64_t issued_ = 0;
};

// Replays a fixed query list; used for transcript replay checks.
class ScriptedAdversary : public Adversary {
 public:
  explicit ScriptedAdversary(std::vector<Point> queries)
      : queries_(std::move(queries)) {}
  Point next_query(const std::vector<GameRound>& history,
                   const ProblemParams&, const Dataset&) override {
    return queries_.at(history.size());
  }

 private:
  std::vector<Point> queries_;
};

// --- searcher adapters -------------------------------------------------

class FairSearcher : public Searcher {
 public:
  FairSearcher(std::shared_ptr<Dataset> ds, ProblemParams params,
               std::uint64_t seed, FairConfig cfg = {})
      : index_(std::move(ds), params, seed, cfg) {}
  HarnessAnswer query(const Point& q, RngStream& rng) override;
  void apply_insert(const Point& pt) override { index_.insert(pt); }
  void apply_erase(PointId id) override { index_.erase(id); }
  FairIndex& index() { return index_; }

 private:
  FairIndex index_;
};

// Plain oblivious LSH searcher; table_override > 0 pins L (1 = the
// single-table attack target).
class ClassicSearcher : public Searcher {
 public:
  ClassicSearcher(std::shared_ptr<Dataset> ds, ProblemParams params,
                  std::uint64_t seed, std::uint32_t table_override = 0);
  HarnessAnswer query(const Point& q, RngStream& rng) override;
  void apply_insert(const Point& pt) override { index_.insert(pt); }
  void apply_erase(PointId id) override { index_.erase(id); }

 private:
  AmplifiedLshIndex index_;
};

class BucketedSearcher : public Searcher {
 public:
  BucketedSearcher(std::shared_ptr<Dataset> ds, ProblemParams params,
                   BucketedConfig cfg, std::uint64_t seed)
      : index_(std::move(ds), params, cfg, seed) {}
  HarnessAnswer query(const Point& q, RngStream& rng) override;
  void apply_insert(const Point& pt) override { index_.insert(pt); }
  void apply_erase(PointId id) override { index_.erase(id); }
  BucketedIndex& index() { return index_; }

 private:
  BucketedIndex index_;
};

class AnnuliSearcher : public Searcher {
 public:
  AnnuliSearcher(std::shared_ptr<Dataset> ds, ProblemParams params,
                 AnnuliConfig cfg, std::uint64_t seed)
      : index_(std::move(ds), params, cfg, seed) {}
  HarnessAnswer query(const Point& q, RngStream& rng) override;
  void apply_insert(const Point& pt) override { index_.insert(pt); }
  void apply_erase(PointId id) override { index_.erase(id); }
  AnnuliIndex& index() { return index_; }

 private:
  AnnuliIndex index_;
};

class RelaxedSearcher : public Searcher {
 public:
  RelaxedSearcher(std::shared_ptr<Dataset> ds, ProblemParams params,
                  RelaxedConfig cfg, std::uint64_t seed)
      : index_(std::move(ds), params, cfg, seed) {}
  HarnessAnswer query(const Point& q, RngStream& rng) override;
  RelaxedFairAnnuli& index() { return index_; }

 private:
  RelaxedFairAnnuli index_;
};

class DeciderSearcher : public Searcher {
 public:
  DeciderSearcher(std::shared_ptr<Dataset> ds, ProblemParams params,
                  DeciderConfig cfg, std::uint64_t seed)
      : decider_(ds, params, cfg, seed), ds_(std::move(ds)) {}
  HarnessAnswer query(const Point& q, RngStream& rng) override {
    return HarnessAnswer::decision(decider_.decide(q, rng));
  }
  void apply_insert(const Point& pt) override { decider_.insert(pt); }
  void apply_erase(PointId id) override { decider_.erase(id); }

 private:
  RobustDecider decider_;
  std::shared_ptr<Dataset> ds_;
};

// Brute-force reference searcher; never loses.
class OracleStubSearcher : public Searcher {
 public:
  OracleStubSearcher(std::shared_ptr<Dataset> ds, ProblemParams params)
      : ds_(std::move(ds)), params_(params) {}
  HarnessAnswer query(const Point& q, RngStream& rng) override;
  void apply_insert(const Point& pt) override { ds_->append(pt); }
  void apply_erase(PointId id) override { ds_->erase(id); }

 private:
  std::shared_ptr<Dataset> ds_;
  ProblemParams params_;
};

class AlwaysBottomSearcher : public Searcher {
 public:
  HarnessAnswer query(const Point&, RngStream&) override {
    return HarnessAnswer::bottom();
  }
};

// --- statistical drivers ------------------------------------------------

struct FairnessReport {
  bool skipped = false;  // empty ball: nothing to test
  ChiSquareReport chi;
  std::vector<PointId> ball_ids;
  std::vector<std::uint64_t> counts;
  std::uint64_t bottoms = 0;   // trials answered bottom
  std::uint64_t invalid = 0;   // answers outside the ball (validity bug)
};

using PointSampler =
    std::function<std::optional<PointId>(const Point&, RngStream&)>;

// Chi-square of a sampler's outputs against uniform over the oracle ball.
// Refuses underpowered runs (trials < 10 * |ball|).
FairnessReport fairness_test(const PointSampler& sampler, const Dataset& ds,
                             const Point& q, double radius,
                             std::uint64_t trials, std::uint64_t seed,
                             std::string_view stream_tag = "fairness");

struct FailureRateReport {
  std::uint64_t games = 0;
  std::uint64_t failures = 0;
  WilsonInterval wilson;
};

FailureRateReport failure_rate(
    const std::function<bool(std::uint64_t)>& run_one_game,
    std::uint64_t games);

// --- instance generators -------------------------------------------------

Point random_hamming_point(std::size_t dim, RngStream& rng);

// Flips `dist` distinct random coordinates of base.
Point at_hamming_distance(const Point& base, std::size_t dist, RngStream& rng);

std::shared_ptr<Dataset> random_hamming_dataset(std::size_t n, std::size_t dim,
                                                RngStream& rng);

struct PlantedInstance {
  std::shared_ptr<Dataset> data;
  Point query;
  std::vector<PointId> planted;  // ids within distance r of query
};

// ball_size distinct points within r of a hidden query; all other points
// strictly beyond cr.
PlantedInstance planted_instance(std::size_t n, std::size_t dim,
                                 const ProblemParams& params,
                                 std::size_t ball_size, RngStream& rng);

// First point isolated at the origin, fillers at weight >= min_weight; the
// bucket-prober demo dataset.
std::shared_ptr<Dataset> isolated_instance(std::size_t n, std::size_t dim,
                                           std::size_t min_weight,
                                           RngStream& rng);

}  // namespace robann
