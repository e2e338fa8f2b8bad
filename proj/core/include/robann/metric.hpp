#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace robann {

using PointId = std::uint64_t;

enum class SpaceMode { kHamming, kLp };

// A point in either the Hamming hypercube (bits, packed into words) or an
// lp box (real coordinates). All points of one dataset share mode and dim.
class Point {
 public:
  Point() = default;

  static Point hamming(std::string_view bits);           // e.g. "0110"
  static Point hamming(const std::vector<int>& bits);
  static Point real(std::vector<double> coords);

  SpaceMode mode() const { return mode_; }
  std::size_t dim() const { return dim_; }

  bool bit(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set_bit(std::size_t i, bool v);
  double coord(std::size_t i) const { return reals_[i]; }
  const std::vector<double>& coords() const { return reals_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const Point& other) const;

  std::string to_string() const;  // "0110" or "0.5 1 2.25"

 private:
  SpaceMode mode_ = SpaceMode::kHamming;
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;  // Hamming, packed lsb-first
  std::vector<double> reals_;         // lp
};

// (c, r)-ANN problem parameters plus the adaptive-query budget Q and the
// failure probability delta. delta is capped at 0.0025; the DP analysis
// behind the robust decider needs delta < epsilon/4 with epsilon = 0.01.
struct ProblemParams {
  double c = 2.0;
  double r = 1.0;
  std::uint64_t max_queries = 1;  // Q
  double delta = 0.001;
  SpaceMode mode = SpaceMode::kHamming;
  double p = 2.0;  // lp exponent, ignored in Hamming mode

  double cr() const { return c * r; }
  void validate() const;
};

// Hamming: number of differing coordinates. Lp: (sum |a_i-b_i|^p)^(1/p).
// Throws std::invalid_argument on mode or dimension mismatch.
double distance(const Point& a, const Point& b, double p = 2.0);

// Ordered collection of points with stable ids. Ids are assigned by an
// increasing counter and never reused after deletion.
class Dataset {
 public:
  Dataset(SpaceMode mode, std::size_t dim, double p = 2.0);

  SpaceMode mode() const { return mode_; }
  std::size_t dim() const { return dim_; }
  double lp_exponent() const { return p_; }

  PointId append(Point pt);
  void erase(PointId id);  // throws on dead/unknown id

  bool alive(PointId id) const {
    return id < slots_.size() && slots_[id].has_value();
  }
  const Point& point(PointId id) const;
  std::size_t size() const { return live_; }           // live points
  PointId next_id() const { return slots_.size(); }    // id of next append

  std::vector<PointId> live_ids() const;  // ascending

  template <typename F>
  void for_each(F&& fn) const {
    for (PointId id = 0; id < slots_.size(); ++id) {
      if (slots_[id]) fn(id, *slots_[id]);
    }
  }

  void check_compatible(const Point& q) const;

 private:
  SpaceMode mode_;
  std::size_t dim_;
  double p_;
  std::vector<std::optional<Point>> slots_;
  std::size_t live_ = 0;
};

// Closed ball: ids of all live points at distance <= radius from q,
// ascending. This is the brute-force oracle; comparisons are exact <=.
std::vector<PointId> ball(const Dataset& ds, const Point& q, double radius);

// Ground truth for judging one query under the (c, r)-ANN contract and the
// weak decision contract. A returned point is correct iff it is in the
// cr-ball; bottom is correct iff the r-ball is empty; a decision bit 1 is
// correct iff the cr-ball is nonempty, 0 iff the r-ball is empty.
struct OracleVerdicts {
  bool r_ball_nonempty = false;
  bool cr_ball_nonempty = false;
  std::vector<PointId> cr_ball_ids;  // ascending

  bool point_correct(PointId id) const;
  bool bottom_correct() const { return !r_ball_nonempty; }
  bool bit_correct(int bit) const {
    return bit == 1 ? cr_ball_nonempty : !r_ball_nonempty;
  }
};

OracleVerdicts oracle_ann_verdicts(const Dataset& ds, const Point& q,
                                   const ProblemParams& params);

}  // namespace robann
