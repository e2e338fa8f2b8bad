#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "robann/lsh.hpp"
#include "robann/metric.hpp"
#include "robann/rng.hpp"

namespace robann {

struct ForAllConfig {
  RhoFn rho_mode = RhoFn::kBitSampling;  // sizing exponent only
  double sample_const = 1.0;             // Csamp for the sampled query
  std::uint64_t max_tables = 100000;
  // Log of the query universe size the union bound covers; NaN means the
  // whole hypercube, d * ln 2.
  double log_universe = std::numeric_limits<double>::quiet_NaN();
};

// One Hamming index sized so that, with high probability over the build,
// every query in the universe with a nonempty r-ball gets answered: tables
// satisfy (1 - p1^k)^L <= 1 / (n^2 * universe), checked in log space. The
// table count starts at ceil(n^rho * d * ln n) and is raised to the union
// bound's minimum when the formula alone falls short.
class ForAllHammingIndex {
 public:
  ForAllHammingIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
                     ForAllConfig cfg, std::uint64_t seed);

  // Scans all L tables; first candidate within cr, else nullopt. Answers
  // are re-checked against cr before returning.
  std::optional<PointId> query(const Point& q) const;

  // Probes ceil(n^rho * ln n * Csamp) sampled tables first, falling back to
  // the full scan when every probe misses.
  std::optional<PointId> query_sampled(const Point& q, RngStream& rng) const;

  const AmplifiedLshIndex& index() const { return index_; }
  std::uint64_t sample_probes() const { return sample_probes_; }
  // Slack of the log-space sizing check; >= 0 means the bound holds.
  double log_bound_slack() const { return log_bound_slack_; }

 private:
  ProblemParams params_;
  ForAllConfig cfg_;
  std::uint64_t sample_probes_ = 1;
  double log_bound_slack_ = 0.0;
  AmplifiedLshIndex index_;
};

enum class CoveringMode { kGrid, kDataDependent };

// Delta-covering with arithmetic snapping; cover points are never
// materialized. Grid mode covers the box ||q||_inf <= C with per-axis step
// Delta / d^(1/p); data-dependent mode covers the r-ball of every dataset
// point with a local grid anchored at that point.
class Covering {
 public:
  static Covering grid(double box_bound, double delta, double p,
                       std::size_t dim, double cell_cap = 1e6);
  static Covering data_dependent(std::shared_ptr<Dataset> ds, double r,
                                 double delta, double cell_cap = 1e6);

  // Nearest cover point, or nullopt when q is outside the covered region
  // (data-dependent mode only; grid mode clamps into the box).
  std::optional<Point> snap(const Point& q) const;

  CoveringMode mode() const { return mode_; }
  double delta() const { return delta_; }
  double step() const { return step_; }
  double box_bound() const { return box_bound_; }
  // ln of the covering size bound: d*ln(2C d^(1/p)/Delta) for the grid,
  // ln n + d*ln(2r d^(1/p)/Delta) for the data-dependent collection.
  double log_size_bound() const { return log_size_bound_; }

 private:
  Covering() = default;

  CoveringMode mode_ = CoveringMode::kGrid;
  std::size_t dim_ = 0;
  double p_ = 2.0;
  double delta_ = 0.0;
  double step_ = 0.0;
  double box_bound_ = 0.0;  // C (grid) or r (data-dependent)
  double log_size_bound_ = 0.0;
  std::shared_ptr<Dataset> anchors_;  // data-dependent mode
};

struct DiscretizedConfig {
  double delta = 0.0;  // 0 derives cr/10
  double cell_cap = 1e6;
  ForAllConfig inner;
  // p == 1 datasets on integer coordinates may use the thermometer-code
  // Hamming reduction; everything else uses the exact scanning structure.
  bool allow_unary_embedding = true;
};

// lp search through a covering: queries snap to the nearest cover point and
// an inner structure solves (c', r + Delta)-ANN with c' = (cr-Delta)/(r+Delta)
// on behalf of every cover point. Uncovered queries in data-dependent mode
// fall back to a baseline structure for the original (c, r) problem.
class DiscretizedIndex {
 public:
  DiscretizedIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
                   CoveringMode mode, double box_bound, DiscretizedConfig cfg,
                   std::uint64_t seed);
  ~DiscretizedIndex();

  std::optional<PointId> query(const Point& q) const;

  const Covering& covering() const { return *covering_; }
  double inner_c() const { return c_inner_; }
  double inner_r() const { return r_inner_; }
  bool uses_unary_embedding() const { return unary_ != nullptr; }

  // Sizing exponent of Thm-style inner structures for the lp reduction.
  static double reduced_rho(double c);

 private:
  std::optional<PointId> inner_query(const Point& snapped) const;
  std::optional<PointId> baseline_query(const Point& q) const;

  struct UnaryReduction;

  std::shared_ptr<Dataset> ds_;
  ProblemParams params_;
  DiscretizedConfig cfg_;
  double delta_ = 0.0;
  double c_inner_ = 1.0;
  double r_inner_ = 0.0;
  std::unique_ptr<Covering> covering_;
  std::unique_ptr<UnaryReduction> unary_;
};

}  // namespace robann
