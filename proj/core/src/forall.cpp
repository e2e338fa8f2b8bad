#include "robann/forall.hpp"

#include <cmath>
#include <stdexcept>

namespace robann {

namespace {

LshParams forall_lsh_params(const ProblemParams& params, const Dataset& ds,
                            const ForAllConfig& cfg, std::uint64_t seed,
                            double* slack_out) {
  LshParams lp = derive_params(params, ds.size(), ds.dim(), 1.0, seed);
  const double n = static_cast<double>(std::max<std::size_t>(ds.size(), 1));
  const double d = static_cast<double>(ds.dim());
  const double rho = rho_value(cfg.rho_mode, params.c);
  const double formula = std::ceil(std::pow(n, rho) * d * std::log(n));

  const double hit = std::pow(lp.p1, static_cast<double>(lp.k_concat));
  const double log_miss = std::log1p(-hit);  // ln(1 - p1^k) < 0
  const double log_universe =
      std::isnan(cfg.log_universe) ? d * std::log(2.0) : cfg.log_universe;
  const double target = -(2.0 * std::log(n) + log_universe);
  // smallest L with L * ln(1 - p1^k) <= target
  const double minimum = std::ceil(target / log_miss);

  const double tables = std::max({formula, minimum, 1.0});
  if (tables > static_cast<double>(cfg.max_tables)) {
    throw std::runtime_error(
        "ForAllHammingIndex: union-bound sizing needs more tables than "
        "max_tables allows");
  }
  lp.L_tables = static_cast<std::uint32_t>(tables);
  const double slack = target - tables * log_miss;
  if (slack < 0.0) {
    throw std::logic_error("ForAllHammingIndex: log-space check violated");
  }
  if (slack_out != nullptr) *slack_out = slack;
  return lp;
}

}  // namespace

ForAllHammingIndex::ForAllHammingIndex(std::shared_ptr<Dataset> ds,
                                       ProblemParams params, ForAllConfig cfg,
                                       std::uint64_t seed)
    : params_(params),
      cfg_(cfg),
      index_(ds, params,
             forall_lsh_params(params, *ds, cfg, seed, &log_bound_slack_)) {
  const double n = static_cast<double>(std::max<std::size_t>(ds->size(), 1));
  const double rho = rho_value(cfg_.rho_mode, params_.c);
  const double probes =
      std::ceil(std::pow(n, rho) * std::log(n) * cfg_.sample_const);
  sample_probes_ = static_cast<std::uint64_t>(std::clamp(
      probes, 1.0, static_cast<double>(index_.lsh_params().L_tables)));
}

std::optional<PointId> ForAllHammingIndex::query(const Point& q) const {
  return index_.classic_query(q);
}

std::optional<PointId> ForAllHammingIndex::query_sampled(
    const Point& q, RngStream& rng) const {
  const Dataset& ds = *index_.dataset();
  ds.check_compatible(q);
  const double cr = params_.cr();
  const std::uint32_t L = index_.lsh_params().L_tables;
  for (std::uint64_t probe = 0; probe < sample_probes_; ++probe) {
    const auto t = static_cast<std::size_t>(rng.next_below(L));
    if (const auto* b = index_.bucket(t, index_.key(t, q))) {
      for (const PointId id : *b) {
        if (distance(ds.point(id), q) <= cr) return id;
      }
    }
  }
  return query(q);  // every probe missed
}

Covering Covering::grid(double box_bound, double delta, double p,
                        std::size_t dim, double cell_cap) {
  if (!(box_bound > 0.0) || !(delta > 0.0) || !(p >= 1.0) || dim == 0) {
    throw std::invalid_argument("Covering::grid: bad parameters");
  }
  Covering cov;
  cov.mode_ = CoveringMode::kGrid;
  cov.dim_ = dim;
  cov.p_ = p;
  cov.delta_ = delta;
  cov.box_bound_ = box_bound;
  cov.step_ = delta / std::pow(static_cast<double>(dim), 1.0 / p);
  cov.log_size_bound_ =
      static_cast<double>(dim) * std::log(2.0 * box_bound / cov.step_);
  if (cov.log_size_bound_ > std::log(cell_cap)) {
    throw std::runtime_error(
        "Covering::grid: size bound exceeds the cell cap; raise cell_cap or "
        "coarsen delta");
  }
  return cov;
}

Covering Covering::data_dependent(std::shared_ptr<Dataset> ds, double r,
                                  double delta, double cell_cap) {
  if (!ds || ds->mode() != SpaceMode::kLp) {
    throw std::invalid_argument("Covering::data_dependent: lp dataset needed");
  }
  if (!(r > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("Covering::data_dependent: bad parameters");
  }
  Covering cov;
  cov.mode_ = CoveringMode::kDataDependent;
  cov.dim_ = ds->dim();
  cov.p_ = ds->lp_exponent();
  cov.delta_ = delta;
  cov.box_bound_ = r;
  cov.step_ = delta / std::pow(static_cast<double>(cov.dim_), 1.0 / cov.p_);
  const double n = static_cast<double>(std::max<std::size_t>(ds->size(), 1));
  cov.log_size_bound_ =
      std::log(n) +
      static_cast<double>(cov.dim_) * std::log(2.0 * r / cov.step_);
  if (cov.log_size_bound_ > std::log(cell_cap)) {
    throw std::runtime_error(
        "Covering::data_dependent: size bound exceeds the cell cap");
  }
  cov.anchors_ = std::move(ds);
  return cov;
}

std::optional<Point> Covering::snap(const Point& q) const {
  if (q.mode() != SpaceMode::kLp || q.dim() != dim_) {
    throw std::invalid_argument("Covering::snap: incompatible query");
  }
  std::vector<double> out(dim_);
  if (mode_ == CoveringMode::kGrid) {
    for (std::size_t i = 0; i < dim_; ++i) {
      const double x = std::clamp(q.coord(i), -box_bound_, box_bound_);
      const double j = std::round((x + box_bound_) / step_);
      out[i] = std::min(-box_bound_ + j * step_, box_bound_);
    }
    return Point::real(std::move(out));
  }

  // Nearest anchor within r; candidates are filtered by exact distance.
  std::optional<PointId> best;
  double best_dist = 0.0;
  anchors_->for_each([&](PointId id, const Point& pt) {
    const double dist = distance(pt, q, p_);
    if (dist <= box_bound_ && (!best || dist < best_dist)) {
      best = id;
      best_dist = dist;
    }
  });
  if (!best) return std::nullopt;
  const Point& anchor = anchors_->point(*best);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double t =
        std::clamp(q.coord(i) - anchor.coord(i), -box_bound_, box_bound_);
    const double j = std::round(t / step_);
    const double v =
        std::clamp(j * step_, -box_bound_, box_bound_);
    out[i] = anchor.coord(i) + v;
  }
  return Point::real(std::move(out));
}

struct DiscretizedIndex::UnaryReduction {
  std::shared_ptr<Dataset> embedded;
  std::vector<PointId> to_original;
  std::unique_ptr<ForAllHammingIndex> inner;
  long long box = 0;          // integer C
  std::size_t axis_bits = 0;  // 2C per axis

  Point embed(const Point& src) const {
    std::vector<int> bits(axis_bits * src.dim(), 0);
    for (std::size_t i = 0; i < src.dim(); ++i) {
      const double shifted = src.coord(i) + static_cast<double>(box);
      const long long level = std::llround(shifted);
      if (std::abs(shifted - static_cast<double>(level)) > 1e-6 || level < 0 ||
          level > 2 * box) {
        throw std::invalid_argument(
            "unary embedding: coordinate off the integer grid");
      }
      for (long long b = 0; b < level; ++b) {
        bits[i * axis_bits + static_cast<std::size_t>(b)] = 1;
      }
    }
    return Point::hamming(bits);
  }
};

namespace {

bool nearly_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

bool integer_dataset(const Dataset& ds) {
  bool ok = true;
  ds.for_each([&](PointId, const Point& pt) {
    for (std::size_t i = 0; i < pt.dim(); ++i) {
      if (!nearly_integer(pt.coord(i))) ok = false;
    }
  });
  return ok;
}

}  // namespace

DiscretizedIndex::~DiscretizedIndex() = default;

double DiscretizedIndex::reduced_rho(double c) {
  return (10.0 + c) * (10.0 + c) / (161.0 * c * c - 20.0 * c - 100.0);
}

DiscretizedIndex::DiscretizedIndex(std::shared_ptr<Dataset> ds,
                                   ProblemParams params, CoveringMode mode,
                                   double box_bound, DiscretizedConfig cfg,
                                   std::uint64_t seed)
    : ds_(std::move(ds)), params_(params), cfg_(cfg) {
  params_.validate();
  if (ds_->mode() != SpaceMode::kLp) {
    throw std::invalid_argument("DiscretizedIndex: lp datasets only");
  }
  delta_ = cfg_.delta > 0.0 ? cfg_.delta : params_.cr() / 10.0;
  if (!(delta_ < params_.r * (params_.c - 1.0) / 2.0)) {
    throw std::invalid_argument(
        "DiscretizedIndex: need delta < r(c-1)/2 so the reduced c stays > 1");
  }
  r_inner_ = params_.r + delta_;
  c_inner_ = (params_.cr() - delta_) / r_inner_;

  if (mode == CoveringMode::kGrid) {
    covering_ = std::make_unique<Covering>(Covering::grid(
        box_bound, delta_, ds_->lp_exponent(), ds_->dim(), cfg_.cell_cap));
  } else {
    covering_ = std::make_unique<Covering>(Covering::data_dependent(
        ds_, params_.r, delta_, cfg_.cell_cap));
  }

  // Thermometer-code reduction: exact l1 -> Hamming on integer grids.
  const bool unary_ok =
      cfg_.allow_unary_embedding && mode == CoveringMode::kGrid &&
      ds_->lp_exponent() == 1.0 && nearly_integer(covering_->step()) &&
      covering_->step() >= 1.0 && nearly_integer(box_bound) &&
      integer_dataset(*ds_);
  if (unary_ok) {
    auto red = std::make_unique<UnaryReduction>();
    red->box = std::llround(box_bound);
    red->axis_bits = static_cast<std::size_t>(2 * red->box);
    const std::size_t dim_h = red->axis_bits * ds_->dim();
    if (c_inner_ * r_inner_ <= static_cast<double>(dim_h)) {
      red->embedded =
          std::make_shared<Dataset>(SpaceMode::kHamming, dim_h);
      bool embeddable = true;
      ds_->for_each([&](PointId id, const Point& pt) {
        for (std::size_t i = 0; i < pt.dim(); ++i) {
          if (std::abs(pt.coord(i)) > box_bound) embeddable = false;
        }
        if (embeddable) {
          red->embedded->append(red->embed(pt));
          red->to_original.push_back(id);
        }
      });
      if (embeddable) {
        ProblemParams inner = params_;
        inner.c = c_inner_;
        inner.r = r_inner_;
        inner.mode = SpaceMode::kHamming;
        ForAllConfig inner_cfg = cfg_.inner;
        inner_cfg.log_universe = covering_->log_size_bound();
        red->inner = std::make_unique<ForAllHammingIndex>(
            red->embedded, inner, inner_cfg, seed);
        unary_ = std::move(red);
      }
    }
  }
}

std::optional<PointId> DiscretizedIndex::inner_query(
    const Point& snapped) const {
  if (unary_) {
    const auto hit = unary_->inner->query(unary_->embed(snapped));
    if (!hit) return std::nullopt;
    return unary_->to_original[*hit];
  }
  // Contract-honoring scan for the reduced (c', r + Delta) problem.
  std::optional<PointId> best;
  double best_dist = 0.0;
  ds_->for_each([&](PointId id, const Point& pt) {
    const double dist = distance(pt, snapped, ds_->lp_exponent());
    if (!best || dist < best_dist) {
      best = id;
      best_dist = dist;
    }
  });
  if (!best || best_dist > c_inner_ * r_inner_) return std::nullopt;
  return best;
}

std::optional<PointId> DiscretizedIndex::baseline_query(const Point& q) const {
  std::optional<PointId> best;
  double best_dist = 0.0;
  ds_->for_each([&](PointId id, const Point& pt) {
    const double dist = distance(pt, q, ds_->lp_exponent());
    if (!best || dist < best_dist) {
      best = id;
      best_dist = dist;
    }
  });
  if (!best || best_dist > params_.cr()) return std::nullopt;
  return best;
}

std::optional<PointId> DiscretizedIndex::query(const Point& q) const {
  ds_->check_compatible(q);
  if (covering_->mode() == CoveringMode::kGrid) {
    for (std::size_t i = 0; i < q.dim(); ++i) {
      if (std::abs(q.coord(i)) > covering_->box_bound()) {
        throw std::invalid_argument(
            "DiscretizedIndex: query outside the declared box");
      }
    }
  }
  const auto snapped = covering_->snap(q);
  if (!snapped) return baseline_query(q);  // uncovered: B_S(q, r) is empty

  const auto hit = inner_query(*snapped);
  if (!hit) return std::nullopt;
  const double p = ds_->lp_exponent();
  const double to_snap = distance(ds_->point(*hit), *snapped, p);
  const double to_query = distance(ds_->point(*hit), q, p);
  const double fp_slack = 1e-9 * params_.cr();
  if (to_snap > params_.cr() - delta_ + fp_slack ||
      to_query > params_.cr() + fp_slack) {
    throw std::logic_error("DiscretizedIndex: triangle-chain check failed");
  }
  if (to_query > params_.cr()) return std::nullopt;  // exact contract
  return hit;
}

}  // namespace robann
