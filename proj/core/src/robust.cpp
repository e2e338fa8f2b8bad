#include "robann/robust.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace robann {

namespace {

double actual_rho(const ProblemParams& params, std::size_t dim) {
  const double d = static_cast<double>(dim);
  const double p1 = 1.0 - params.r / d;
  const double p2 = 1.0 - params.cr() / d;
  if (p2 <= 0.0) return 0.0;
  return std::log(1.0 / p1) / std::log(1.0 / p2);
}

// Tables per copy: enough for the base n^rho guarantee and for a planted
// r-near point to collide with probability >= 1 - copy_miss.
LshParams decider_copy_params(const ProblemParams& params, const Dataset& ds,
                              double copy_miss, std::uint64_t max_tables,
                              std::uint64_t seed) {
  LshParams lp = derive_params(params, ds.size(), ds.dim(), 1.0, seed);
  const double hit = std::pow(lp.p1, static_cast<double>(lp.k_concat));
  if (hit < 1.0 && copy_miss > 0.0 && copy_miss < 1.0) {
    const double needed =
        std::ceil(std::log(copy_miss) / std::log(1.0 - hit));
    if (needed > static_cast<double>(max_tables)) {
      throw std::runtime_error(
          "RobustDecider: copy table count exceeds max_tables; relax "
          "copy_miss or raise the cap");
    }
    lp.L_tables =
        std::max(lp.L_tables, static_cast<std::uint32_t>(std::max(1.0, needed)));
  }
  return lp;
}

}  // namespace

RobustDecider::RobustDecider(std::shared_ptr<Dataset> ds, ProblemParams params,
                             DeciderConfig cfg, std::uint64_t seed)
    : ds_(std::move(ds)), params_(params), cfg_(cfg) {
  params_.validate();
  const dp::DeciderConstants paper = dp::decider_constants(params_);
  const std::uint64_t copies = cfg_.copies > 0 ? cfg_.copies : paper.copies;
  subsample_ = cfg_.subsample > 0 ? cfg_.subsample : paper.subsample;
  if (copies == 0) throw std::invalid_argument("RobustDecider: zero copies");
  copies_.reserve(copies);
  for (std::uint64_t i = 0; i < copies; ++i) {
    copies_.emplace_back(
        ds_, params_,
        decider_copy_params(params_, *ds_, cfg_.copy_miss, cfg_.max_tables,
                            RngStream::word_at(seed, stream_id("decider-copy", i), 0)));
  }
}

int RobustDecider::decide(const Point& q, RngStream& rng) {
  if (queries_used_ >= params_.max_queries) {
    throw std::runtime_error("RobustDecider: query budget Q exceeded");
  }
  ++queries_used_;
  std::unordered_map<std::size_t, int> memo;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < subsample_; ++i) {
    const std::size_t j = rng.next_below(copies_.size());
    auto it = memo.find(j);
    if (it == memo.end()) {
      it = memo.emplace(j, copies_[j].weak_decide(q) ? 1 : 0).first;
    }
    ones += it->second;
  }
  const double frac =
      static_cast<double>(ones) / static_cast<double>(subsample_);
  double noisy = frac;
  if (cfg_.noise_scale != 0.0) {
    noisy += cfg_.noise_scale *
             dp::laplace_sample(1.0 / static_cast<double>(subsample_), rng);
  }
  return noisy > 0.5 ? 1 : 0;
}

PointId RobustDecider::insert(const Point& pt) {
  const PointId id = ds_->append(pt);
  on_insert(id);
  return id;
}

void RobustDecider::erase(PointId id) {
  on_erase(id);
  ds_->erase(id);
}

void RobustDecider::on_insert(PointId id) {
  for (auto& c : copies_) c.index_point(id);
}

void RobustDecider::on_erase(PointId id) {
  for (auto& c : copies_) c.unindex_point(id);
}

BucketedIndex::BucketedIndex(std::shared_ptr<Dataset> master,
                             ProblemParams params, BucketedConfig cfg,
                             std::uint64_t seed, DeciderFactory factory)
    : master_(std::move(master)), params_(params) {
  params_.validate();
  const std::size_t n = std::max<std::size_t>(master_->size(), 1);
  const double rho = actual_rho(params_, master_->dim());
  alpha_ = cfg.alpha > 0.0 ? cfg.alpha : 1.0 / (2.0 - rho);
  const double nn = static_cast<double>(n);
  const auto kappa = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::pow(nn, 1.0 - alpha_))));
  const auto seg_size = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::pow(nn, alpha_))));

  ProblemParams seg_params = params_;
  seg_params.delta = params_.delta / static_cast<double>(kappa);

  if (!factory) {
    const DeciderConfig dec_cfg = cfg.decider;
    factory = [dec_cfg, seg_params](std::shared_ptr<Dataset> segment,
                                    ProblemParams sp, std::uint64_t s) {
      (void)seg_params;
      return std::make_unique<RobustDecider>(std::move(segment), sp, dec_cfg,
                                             s);
    };
  }

  const auto ids = master_->live_ids();
  segments_.resize(kappa);
  for (std::size_t s = 0; s < kappa; ++s) {
    segments_[s].data = std::make_shared<Dataset>(
        master_->mode(), master_->dim(), master_->lp_exponent());
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t s = std::min(i / seg_size, kappa - 1);
    segments_[s].data->append(master_->point(ids[i]));
    segments_[s].master_ids.push_back(ids[i]);
  }
  for (std::size_t s = 0; s < kappa; ++s) {
    segments_[s].decider = factory(
        segments_[s].data, seg_params,
        RngStream::word_at(seed, stream_id("bucket-segment", s), 0));
  }
}

std::optional<PointId> BucketedIndex::query(const Point& q, RngStream& rng) {
  if (queries_used_ >= params_.max_queries) {
    throw std::runtime_error("BucketedIndex: query budget Q exceeded");
  }
  ++queries_used_;
  const double cr = params_.cr();
  for (auto& seg : segments_) {
    if (seg.data->size() == 0) continue;
    if (seg.decider->decide(q, rng) != 1) continue;
    for (std::size_t local = 0; local < seg.master_ids.size(); ++local) {
      if (!seg.data->alive(local)) continue;
      if (distance(seg.data->point(local), q) <= cr) {
        return seg.master_ids[local];
      }
    }
    // decider said 1 but the segment holds no cr-point; try later segments
  }
  return std::nullopt;
}

PointId BucketedIndex::insert(const Point& pt) {
  std::size_t best = 0;
  for (std::size_t s = 1; s < segments_.size(); ++s) {
    if (segments_[s].data->size() < segments_[best].data->size()) best = s;
  }
  const PointId master_id = master_->append(pt);
  auto& seg = segments_[best];
  const PointId local = seg.data->append(pt);
  seg.master_ids.push_back(master_id);
  if (local + 1 != seg.master_ids.size()) {
    throw std::logic_error("BucketedIndex: local id bookkeeping broke");
  }
  seg.decider->on_insert(local);
  return master_id;
}

std::size_t BucketedIndex::segment_of(PointId master_id) const {
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& ids = segments_[s].master_ids;
    for (std::size_t local = 0; local < ids.size(); ++local) {
      if (ids[local] == master_id && segments_[s].data->alive(local)) {
        return s;
      }
    }
  }
  throw std::invalid_argument("BucketedIndex: unknown id");
}

void BucketedIndex::erase(PointId id) {
  const std::size_t s = segment_of(id);
  auto& seg = segments_[s];
  for (std::size_t local = 0; local < seg.master_ids.size(); ++local) {
    if (seg.master_ids[local] == id && seg.data->alive(local)) {
      seg.decider->on_erase(local);
      seg.data->erase(local);
      master_->erase(id);
      return;
    }
  }
}

AnnuliIndex::AnnuliIndex(std::shared_ptr<Dataset> ds, ProblemParams params,
                         AnnuliConfig cfg, std::uint64_t seed)
    : ds_(std::move(ds)), params_(params), cfg_(cfg) {
  params_.validate();
  if (cfg_.annuli == 0) throw std::invalid_argument("AnnuliIndex: k == 0");
  const double k = static_cast<double>(cfg_.annuli);
  c_prime_ = std::pow(params_.c, 1.0 / k);
  radii_.resize(cfg_.annuli + 1);
  radii_[0] = params_.r;
  for (std::uint32_t j = 1; j <= cfg_.annuli; ++j) {
    radii_[j] = c_prime_ * radii_[j - 1];
  }
  if (std::abs(radii_[cfg_.annuli] - params_.cr()) >
      1e-12 * params_.cr()) {
    throw std::logic_error("AnnuliIndex: r_k drifted from c*r");
  }

  const double q = static_cast<double>(params_.max_queries);
  if (cfg_.probes == 0) {
    cfg_.probes = static_cast<std::uint64_t>(std::max(
        1.0, std::ceil(2.0 / cfg_.eta * std::log(q * k / params_.delta))));
  }
  probes_ = cfg_.probes;
  if (cfg_.pool == 0) {
    const double m =
        std::ceil(std::log(q * k / params_.delta) / (cfg_.eta * cfg_.eta));
    const double copies = std::ceil(2400.0 *
                                    std::pow(std::log(1.0 / params_.delta), 1.5) *
                                    std::sqrt(2.0 * q));
    const double pool = m * copies;
    if (pool > static_cast<double>(cfg_.max_pool)) {
      throw std::runtime_error(
          "AnnuliIndex: derived testing pool m*L exceeds max_pool; override "
          "cfg.pool for desk-scale runs");
    }
    cfg_.pool = static_cast<std::uint64_t>(pool);
  }
  pool_per_annulus_ = std::max<std::uint64_t>(1, cfg_.pool);

  pools_.resize(cfg_.annuli);
  exec_.resize(cfg_.annuli);
  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    ProblemParams inst = params_;
    inst.c = c_prime_;
    inst.r = radii_[j];
    pools_[j].reserve(pool_per_annulus_);
    for (std::uint64_t i = 0; i < pool_per_annulus_; ++i) {
      pools_[j].emplace_back(
          ds_, inst,
          RngStream::word_at(seed, stream_id("annuli-pool", j), i), cfg_.fair);
    }
    exec_[j] = std::make_unique<FairIndex>(
        ds_, inst, RngStream::word_at(seed, stream_id("annuli-exec", j), 0),
        cfg_.fair);
  }
}

std::uint64_t AnnuliIndex::trunc_budget(std::size_t j) const {
  const double n = static_cast<double>(std::max<std::size_t>(ds_->size(), 2));
  const double k = static_cast<double>(cfg_.annuli);
  double rho;
  if (cfg_.trunc_rho == RhoFn::kBitSampling) {
    ProblemParams inst = params_;
    inst.c = c_prime_;
    inst.r = radii_[j];
    rho = actual_rho(inst, ds_->dim());
  } else {
    rho = rho_value(cfg_.trunc_rho, c_prime_);
  }
  const double log_nq = std::ceil(
      std::log(n * static_cast<double>(params_.max_queries)));
  const double units =
      cfg_.trunc_scale * (std::pow(n, 1.0 / k) + std::pow(n, rho)) * log_nq;
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(units)));
}

AnnuliIndex::Result AnnuliIndex::query(const Point& q, RngStream& rng) {
  if (queries_used_ >= params_.max_queries) {
    throw std::runtime_error("AnnuliIndex: query budget Q exceeded");
  }
  ++queries_used_;
  Result out;
  out.flags.assign(cfg_.annuli, 0);
  out.estimates.assign(cfg_.annuli, 0.0);
  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    const std::uint64_t budget_units = trunc_budget(j);
    std::uint64_t finished = 0;
    for (std::uint64_t probe = 0; probe < probes_; ++probe) {
      const std::uint64_t pick = rng.next_below(pool_per_annulus_);
      RngStream run_rng = rng.split(stream_id("annuli-probe", probe));
      WorkBudget budget(budget_units);
      const FairAnswer a = pools_[j][pick].query(q, run_rng, &budget);
      out.charge += a.charge;
      if (a.outcome != QueryOutcome::kTimeout) ++finished;
    }
    double phat =
        static_cast<double>(finished) / static_cast<double>(probes_);
    if (cfg_.noise_scale != 0.0) {
      phat += cfg_.noise_scale *
              dp::laplace_sample(1.0 / static_cast<double>(probes_), rng);
    }
    out.estimates[j] = phat;
    out.flags[j] = phat >= cfg_.p_star ? 1 : 0;
  }

  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    if (!out.flags[j]) continue;
    out.ran = j;
    RngStream run_rng = rng.split(stream_id("annuli-exec-run", j));
    const FairAnswer a = exec_[j]->query(q, run_rng, nullptr);
    out.charge += a.charge;
    if (a.outcome == QueryOutcome::kFound) {
      if (distance(ds_->point(a.id), q) > params_.cr()) {
        throw std::logic_error("AnnuliIndex: answer escaped the cr ball");
      }
      out.id = a.id;
    }
    return out;
  }
  return out;  // a-hat == 0: bottom
}

PointId AnnuliIndex::insert(const Point& pt) {
  const PointId id = ds_->append(pt);
  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    for (auto& inst : pools_[j]) inst.index_point(id);
    exec_[j]->index_point(id);
  }
  return id;
}

void AnnuliIndex::erase(PointId id) {
  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    for (auto& inst : pools_[j]) inst.unindex_point(id);
    exec_[j]->unindex_point(id);
  }
  ds_->erase(id);
}

RelaxedFairAnnuli::RelaxedFairAnnuli(std::shared_ptr<Dataset> ds,
                                     ProblemParams params, RelaxedConfig cfg,
                                     std::uint64_t seed)
    : ds_(std::move(ds)), params_(params), cfg_(cfg) {
  params_.validate();
  if (cfg_.annuli == 0) throw std::invalid_argument("RelaxedFairAnnuli: k == 0");
  const double k = static_cast<double>(cfg_.annuli);
  c_prime_ = std::pow(params_.c, 1.0 / k);
  radii_.resize(cfg_.annuli);
  instances_.reserve(cfg_.annuli);
  double rj = params_.r;
  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    radii_[j] = rj;
    ProblemParams inst = params_;
    inst.c = c_prime_;
    inst.r = rj;
    instances_.emplace_back(
        ds_, inst, RngStream::word_at(seed, stream_id("relaxed-annulus", j), 0),
        cfg_.fair);
    rj *= c_prime_;
  }
}

std::uint64_t RelaxedFairAnnuli::budget(std::size_t j) const {
  const double n = static_cast<double>(std::max<std::size_t>(ds_->size(), 2));
  const double k = static_cast<double>(cfg_.annuli);
  double rho;
  if (cfg_.trunc_rho == RhoFn::kBitSampling) {
    rho = instances_[j].index().lsh_params().rho;
  } else {
    rho = rho_value(cfg_.trunc_rho, c_prime_);
  }
  const double units =
      cfg_.budget_scale * std::pow(n, std::max(rho, 1.0 / k));
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(units)));
}

RelaxedFairAnnuli::Result RelaxedFairAnnuli::query(const Point& q,
                                                   RngStream& rng) const {
  Result out;
  for (std::uint32_t j = 0; j < cfg_.annuli; ++j) {
    WorkBudget wb(budget(j));
    RngStream run_rng = rng.split(stream_id("relaxed-run", j));
    const FairAnswer a = instances_[j].query(q, run_rng, &wb);
    out.charge += a.charge;
    if (a.outcome == QueryOutcome::kTimeout) continue;
    out.outcome = a.outcome;
    out.id = a.id;
    out.annulus = j;
    if (a.outcome == QueryOutcome::kFound &&
        distance(ds_->point(a.id), q) > params_.cr()) {
      throw std::logic_error("RelaxedFairAnnuli: answer escaped the cr ball");
    }
    return out;
  }
  out.outcome = QueryOutcome::kNotFound;  // every instance timed out
  return out;
}

ExponentReport exponent_optimize(double c, RhoFn fn) {
  if (!(c > 1.0)) throw std::invalid_argument("exponent_optimize: c <= 1");
  ExponentReport rep;
  rep.c = c;
  rep.rho_fn = fn;
  const double loglog = std::log(std::log(std::max(c, 3.0)));
  rep.k_max = static_cast<std::uint32_t>(
      10.0 * std::ceil(std::log(c) / loglog) + 10.0);
  rep.beta = std::numeric_limits<double>::infinity();
  for (std::uint32_t k = 1; k <= rep.k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double cand =
        std::max(rho_value(fn, std::pow(c, 1.0 / kk)), 1.0 / kk);
    if (cand < rep.beta) {
      rep.beta = cand;
      rep.k_star = k;
    }
  }
  // continuous crossover of rho(c^(1/k)) against 1/k, for reporting
  double lo = 1.0;
  double hi = static_cast<double>(rep.k_max);
  auto gap = [&](double k) {
    return rho_value(fn, std::pow(c, 1.0 / k)) - 1.0 / k;
  };
  if (gap(lo) >= 0.0) {
    rep.crossover_k = lo;
  } else if (gap(hi) <= 0.0) {
    rep.crossover_k = hi;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    rep.crossover_k = 0.5 * (lo + hi);
  }
  return rep;
}

}  // namespace robann
