#include "robann/metric.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace robann {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Point Point::hamming(std::string_view bits) {
  Point p;
  p.mode_ = SpaceMode::kHamming;
  p.dim_ = bits.size();
  p.words_.assign((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("Hamming coordinates must be 0 or 1");
    }
  }
  return p;
}

Point Point::hamming(const std::vector<int>& bits) {
  Point p;
  p.mode_ = SpaceMode::kHamming;
  p.dim_ = bits.size();
  p.words_.assign((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == 1) {
      p.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    } else if (bits[i] != 0) {
      throw std::invalid_argument("Hamming coordinates must be 0 or 1");
    }
  }
  return p;
}

Point Point::real(std::vector<double> coords) {
  Point p;
  p.mode_ = SpaceMode::kLp;
  p.dim_ = coords.size();
  p.reals_ = std::move(coords);
  return p;
}

void Point::set_bit(std::size_t i, bool v) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (v) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

bool Point::operator==(const Point& other) const {
  return mode_ == other.mode_ && dim_ == other.dim_ &&
         words_ == other.words_ && reals_ == other.reals_;
}

std::string Point::to_string() const {
  if (mode_ == SpaceMode::kHamming) {
    std::string s(dim_, '0');
    for (std::size_t i = 0; i < dim_; ++i) {
      if (bit(i)) s[i] = '1';
    }
    return s;
  }
  std::string s;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (i) s += ' ';
    s += format_double(reals_[i]);
  }
  return s;
}

void ProblemParams::validate() const {
  if (!(c > 1.0)) throw std::invalid_argument("require c > 1");
  if (!(r > 0.0)) throw std::invalid_argument("require r > 0");
  if (max_queries < 1) throw std::invalid_argument("require Q >= 1");
  if (!(delta > 0.0 && delta <= 0.0025)) {
    throw std::invalid_argument("require delta in (0, 0.0025]");
  }
  if (mode == SpaceMode::kLp && !(p >= 1.0)) {
    throw std::invalid_argument("require lp exponent p >= 1");
  }
}

double distance(const Point& a, const Point& b, double p) {
  if (a.mode() != b.mode()) {
    throw std::invalid_argument("distance: mode mismatch");
  }
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("distance: dimension mismatch");
  }
  if (a.mode() == SpaceMode::kHamming) {
    std::uint64_t diff = 0;
    for (std::size_t w = 0; w < a.words().size(); ++w) {
      diff += std::popcount(a.words()[w] ^ b.words()[w]);
    }
    return static_cast<double>(diff);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    acc += std::pow(std::abs(a.coord(i) - b.coord(i)), p);
  }
  return std::pow(acc, 1.0 / p);
}

Dataset::Dataset(SpaceMode mode, std::size_t dim, double p)
    : mode_(mode), dim_(dim), p_(p) {
  if (dim == 0) throw std::invalid_argument("Dataset: dim must be positive");
}

PointId Dataset::append(Point pt) {
  check_compatible(pt);
  slots_.emplace_back(std::move(pt));
  ++live_;
  return slots_.size() - 1;
}

void Dataset::erase(PointId id) {
  if (!alive(id)) throw std::invalid_argument("Dataset::erase: dead id");
  slots_[id].reset();
  --live_;
}

const Point& Dataset::point(PointId id) const {
  if (!alive(id)) throw std::invalid_argument("Dataset::point: dead id");
  return *slots_[id];
}

std::vector<PointId> Dataset::live_ids() const {
  std::vector<PointId> out;
  out.reserve(live_);
  for (PointId id = 0; id < slots_.size(); ++id) {
    if (slots_[id]) out.push_back(id);
  }
  return out;
}

void Dataset::check_compatible(const Point& q) const {
  if (q.mode() != mode_) {
    throw std::invalid_argument("point/dataset mode mismatch");
  }
  if (q.dim() != dim_) {
    throw std::invalid_argument("point/dataset dimension mismatch");
  }
}

std::vector<PointId> ball(const Dataset& ds, const Point& q, double radius) {
  ds.check_compatible(q);
  std::vector<PointId> out;
  ds.for_each([&](PointId id, const Point& pt) {
    if (distance(pt, q, ds.lp_exponent()) <= radius) out.push_back(id);
  });
  return out;
}

bool OracleVerdicts::point_correct(PointId id) const {
  return std::binary_search(cr_ball_ids.begin(), cr_ball_ids.end(), id);
}

OracleVerdicts oracle_ann_verdicts(const Dataset& ds, const Point& q,
                                   const ProblemParams& params) {
  OracleVerdicts v;
  v.cr_ball_ids = ball(ds, q, params.cr());
  v.cr_ball_nonempty = !v.cr_ball_ids.empty();
  for (const PointId id : v.cr_ball_ids) {
    if (distance(ds.point(id), q, ds.lp_exponent()) <= params.r) {
      v.r_ball_nonempty = true;
      break;
    }
  }
  return v;
}

}  // namespace robann
