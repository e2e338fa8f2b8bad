#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "robann/metric.hpp"
#include "robann/rng.hpp"

namespace robann {

// rho exponent formulas exposed to the optimizer and sizing code. Only the
// bit-sampling family is executable; the others are used through rho alone.
enum class RhoFn { kBitSampling, kHammingOpt, kL2Opt };

double rho_value(RhoFn fn, double c);
const char* rho_fn_name(RhoFn fn);
std::optional<RhoFn> rho_fn_from_name(const std::string& name);

// OR-of-ANDs amplification parameters for Hamming bit sampling.
// p1 = 1 - r/d, p2 = 1 - cr/d, rho = log(1/p1)/log(1/p2),
// k_concat = ceil(log_{1/p2} n), L_tables = ceil(n^rho * max(1, boost)).
// Both counts are clamped to >= 1 for degenerate inputs.
struct LshParams {
  std::uint32_t k_concat = 1;
  std::uint32_t L_tables = 1;
  double p1 = 0.0;
  double p2 = 0.0;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

// boost carries the construction's extra table factor: log(nQ) for the fair
// index, d*log(n) for the for-all index, 1 for the plain oblivious index.
// Throws if cr > dim (far collision probability would drop below zero).
LshParams derive_params(const ProblemParams& params, std::size_t n,
                        std::size_t dim, double boost = 1.0,
                        std::uint64_t seed = 0);

struct Candidate {
  PointId id = 0;
  std::uint32_t collision_count = 0;  // number of colliding tables, in [1, L]
};

// L hash tables, each keyed by the concatenation of k_concat sampled
// coordinates. Tables are deterministic functions of (dataset contents,
// seed): coordinates come from per-table streams of the seed and buckets
// keep insertion order.
class AmplifiedLshIndex {
 public:
  AmplifiedLshIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
                    LshParams lsh);

  const LshParams& lsh_params() const { return lsh_; }
  const ProblemParams& problem() const { return params_; }
  const std::shared_ptr<Dataset>& dataset() const { return ds_; }

  // Packed key of q under table t; one call is one amplified-hash evaluation.
  std::string key(std::size_t table, const Point& q) const;

  // Bucket of q in table t, or nullptr when empty. Ids in insertion order.
  const std::vector<PointId>* bucket(std::size_t table,
                                     const std::string& key) const;

  // Every id sharing >= 1 bucket with q, ascending by id, with the exact
  // number of colliding tables.
  std::vector<Candidate> candidates(const Point& q) const;

  // Scans candidates table-major, bucket order; first id within cr, else
  // nullopt. The deterministic oblivious (c, r)-ANN query.
  std::optional<PointId> classic_query(const Point& q) const;

  // Weak decision: does any candidate lie within cr?
  bool weak_decide(const Point& q) const;

  // Appends to the shared dataset and indexes the new point here only.
  PointId insert(const Point& pt);
  // Unindexes here and erases from the shared dataset. Throws on dead id.
  void erase(PointId id);

  // Index maintenance for composites that share one dataset across copies:
  // hash an existing live dataset point in or out of this index's tables.
  void index_point(PointId id);
  void unindex_point(PointId id);

  // Versioned binary blob: magic, version, params, per-table coordinate
  // lists, buckets in sorted key order. Round-trips bit-exactly.
  std::string serialize() const;
  static AmplifiedLshIndex deserialize(std::shared_ptr<Dataset> ds,
                                       const std::string& blob);

  const std::vector<std::uint32_t>& table_coords(std::size_t t) const {
    return coords_[t];
  }

 private:
  AmplifiedLshIndex() = default;

  void build();

  std::shared_ptr<Dataset> ds_;
  ProblemParams params_;
  LshParams lsh_;
  std::vector<std::vector<std::uint32_t>> coords_;  // [L][k] sampled indices
  std::vector<std::unordered_map<std::string, std::vector<PointId>>> tables_;
};

}  // namespace robann
