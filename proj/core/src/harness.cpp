#include "robann/harness.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace robann {

std::string HarnessAnswer::to_string() const {
  switch (kind) {
    case Kind::kPoint:
      return "id:" + std::to_string(id);
    case Kind::kBottom:
      return "bottom";
    case Kind::kBit:
      return "bit:" + std::to_string(bit);
  }
  return "?";
}

void Searcher::apply_insert(const Point&) {
  throw std::runtime_error("searcher does not support updates");
}

void Searcher::apply_erase(PointId) {
  throw std::runtime_error("searcher does not support updates");
}

std::string Transcript::to_tsv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const auto& r = rounds[i];
    out << (i + 1) << '\t' << r.query.to_string() << '\t'
        << r.answer.to_string() << '\t' << (r.correct ? "ok" : "wrong") << '\t'
        << r.answer.charge << '\n';
  }
  return out.str();
}

RngStream round_stream(std::uint64_t seed, std::uint64_t game,
                       std::uint64_t round) {
  return derive_stream(seed, "query", game * 0x1000003ULL + round);
}

namespace {

bool judge(const Dataset& ds, const ProblemParams& params, const Point& q,
           const HarnessAnswer& a) {
  const OracleVerdicts v = oracle_ann_verdicts(ds, q, params);
  switch (a.kind) {
    case HarnessAnswer::Kind::kPoint:
      return ds.alive(a.id) && v.point_correct(a.id);
    case HarnessAnswer::Kind::kBottom:
      return v.bottom_correct();
    case HarnessAnswer::Kind::kBit:
      return v.bit_correct(a.bit);
  }
  return false;
}

void apply_updates(const std::vector<UpdateOp>& schedule, std::uint64_t round,
                   Searcher& searcher) {
  for (const auto& op : schedule) {
    if (op.after_round != round) continue;
    if (op.is_insert) {
      searcher.apply_insert(op.pt);
    } else {
      searcher.apply_erase(op.id);
    }
  }
}

}  // namespace

Transcript run_game(const std::shared_ptr<Dataset>& ds,
                    const ProblemParams& params, Searcher& searcher,
                    Adversary& adversary, const GameOptions& opt) {
  Transcript t;
  t.rounds.reserve(opt.rounds);
  apply_updates(opt.schedule, 0, searcher);
  for (std::uint64_t round = 1; round <= opt.rounds; ++round) {
    GameRound gr;
    gr.query = adversary.next_query(t.rounds, params, *ds);
    RngStream rng = round_stream(opt.seed, opt.game_ordinal, round);
    gr.answer = searcher.query(gr.query, rng);
    gr.correct = judge(*ds, params, gr.query, gr.answer);
    t.total_charge += gr.answer.charge;
    if (!gr.correct && t.first_failure_round == 0) {
      t.first_failure_round = round;
      t.adversary_won = true;
    }
    t.rounds.push_back(std::move(gr));
    apply_updates(opt.schedule, round, searcher);
  }
  return t;
}

Point ObliviousRandomAdversary::next_query(const std::vector<GameRound>&,
                                           const ProblemParams&,
                                           const Dataset& data) {
  RngStream rng = derive_stream(seed_, "adv-oblivious", issued_++);
  return random_hamming_point(data.dim(), rng);
}

Point RepeatPerturbAdversary::next_query(const std::vector<GameRound>& history,
                                         const ProblemParams& params,
                                         const Dataset& data) {
  RngStream rng = derive_stream(seed_, "adv-perturb", issued_++);
  const Point* last_hit = nullptr;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->answer.kind == HarnessAnswer::Kind::kPoint &&
        data.alive(it->answer.id)) {
      last_hit = &data.point(it->answer.id);
      break;
    }
  }
  if (last_hit == nullptr) return random_hamming_point(data.dim(), rng);
  const auto flips = static_cast<std::size_t>(std::max<double>(1.0, params.r));
  return at_hamming_distance(*last_hit, 1 + rng.next_below(flips), rng);
}

Point BucketProberAdversary::next_query(const std::vector<GameRound>& history,
                                        const ProblemParams& params,
                                        const Dataset& data) {
  const auto ids = data.live_ids();
  if (ids.empty()) {
    RngStream rng = derive_stream(seed_, "adv-prober", issued_++);
    return random_hamming_point(data.dim(), rng);
  }
  const Point& base = data.point(ids.front());

  // A distance-1 probe answered bottom means the flipped coordinate is one
  // of the index's sampled bits: the base point left the probe's bucket.
  if (!learned_coord_ && !history.empty()) {
    const auto& last = history.back();
    if (last.answer.kind == HarnessAnswer::Kind::kBottom &&
        distance(last.query, base) == 1.0) {
      for (std::size_t i = 0; i < base.dim(); ++i) {
        if (last.query.bit(i) != base.bit(i)) {
          learned_coord_ = i;
          break;
        }
      }
    }
  }

  ++issued_;
  Point probe = base;
  if (learned_coord_) {
    probe.set_bit(*learned_coord_, !probe.bit(*learned_coord_));
    return probe;  // crafted repeat: near the base, off its buckets
  }
  (void)params;
  const std::size_t coord = (issued_ - 1) % base.dim();
  probe.set_bit(coord, !probe.bit(coord));
  return probe;
}

Point ReplayWorstAdversary::next_query(const std::vector<GameRound>& history,
                                       const ProblemParams& params,
                                       const Dataset& data) {
  RngStream rng = derive_stream(seed_, "adv-replay-worst", issued_++);
  // Replay the query with the most wrong answers so far, if any.
  std::unordered_map<std::string, std::pair<std::size_t, const Point*>> wrong;
  const Point* worst = nullptr;
  std::size_t worst_count = 0;
  for (const auto& r : history) {
    if (r.correct) continue;
    auto& entry = wrong[r.query.to_string()];
    ++entry.first;
    entry.second = &r.query;
    if (entry.first > worst_count) {
      worst_count = entry.first;
      worst = entry.second;
    }
  }
  if (worst != nullptr) return *worst;

  const auto ids = data.live_ids();
  if (ids.empty()) return random_hamming_point(data.dim(), rng);
  const Point& base = data.point(ids[rng.next_below(ids.size())]);
  if (issued_ % 2 == 1) {
    // near-positive probe
    const auto flips = static_cast<std::size_t>(std::max(1.0, params.r));
    return at_hamming_distance(base, 1 + rng.next_below(flips), rng);
  }
  // far-negative probe
  const auto beyond = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(data.dim()), params.cr() + 1.0));
  return at_hamming_distance(base, beyond, rng);
}

HarnessAnswer FairSearcher::query(const Point& q, RngStream& rng) {
  const FairAnswer a = index_.query(q, rng, nullptr);
  if (a.outcome == QueryOutcome::kFound) {
    return HarnessAnswer::point(a.id, a.charge);
  }
  return HarnessAnswer::bottom(a.charge);
}

ClassicSearcher::ClassicSearcher(std::shared_ptr<Dataset> ds,
                                 ProblemParams params, std::uint64_t seed,
                                 std::uint32_t table_override)
    : index_(ds, params, [&] {
        LshParams lp = derive_params(params, ds->size(), ds->dim(), 1.0, seed);
        if (table_override > 0) lp.L_tables = table_override;
        return lp;
      }()) {}

HarnessAnswer ClassicSearcher::query(const Point& q, RngStream&) {
  const auto hit = index_.classic_query(q);
  return hit ? HarnessAnswer::point(*hit) : HarnessAnswer::bottom();
}

HarnessAnswer BucketedSearcher::query(const Point& q, RngStream& rng) {
  const auto hit = index_.query(q, rng);
  return hit ? HarnessAnswer::point(*hit) : HarnessAnswer::bottom();
}

HarnessAnswer AnnuliSearcher::query(const Point& q, RngStream& rng) {
  const auto res = index_.query(q, rng);
  return res.id ? HarnessAnswer::point(*res.id, res.charge)
                : HarnessAnswer::bottom(res.charge);
}

HarnessAnswer RelaxedSearcher::query(const Point& q, RngStream& rng) {
  const auto res = index_.query(q, rng);
  if (res.outcome == QueryOutcome::kFound) {
    return HarnessAnswer::point(res.id, res.charge);
  }
  return HarnessAnswer::bottom(res.charge);
}

HarnessAnswer OracleStubSearcher::query(const Point& q, RngStream&) {
  const OracleVerdicts v = oracle_ann_verdicts(*ds_, q, params_);
  if (v.cr_ball_nonempty) return HarnessAnswer::point(v.cr_ball_ids.front());
  return HarnessAnswer::bottom();
}

FairnessReport fairness_test(const PointSampler& sampler, const Dataset& ds,
                             const Point& q, double radius,
                             std::uint64_t trials, std::uint64_t seed,
                             std::string_view stream_tag) {
  FairnessReport rep;
  rep.ball_ids = ball(ds, q, radius);
  if (rep.ball_ids.empty()) {
    rep.skipped = true;
    return rep;
  }
  if (trials < 10 * rep.ball_ids.size()) {
    throw std::invalid_argument(
        "fairness_test: underpowered, need trials >= 10 * |ball|");
  }
  rep.counts.assign(rep.ball_ids.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    RngStream rng = derive_stream(seed, stream_tag, t);
    const auto hit = sampler(q, rng);
    if (!hit) {
      ++rep.bottoms;
      continue;
    }
    const auto it =
        std::lower_bound(rep.ball_ids.begin(), rep.ball_ids.end(), *hit);
    if (it == rep.ball_ids.end() || *it != *hit) {
      ++rep.invalid;
      continue;
    }
    ++rep.counts[static_cast<std::size_t>(it - rep.ball_ids.begin())];
  }
  rep.chi = chi_square_uniform(rep.counts);
  return rep;
}

FailureRateReport failure_rate(
    const std::function<bool(std::uint64_t)>& run_one_game,
    std::uint64_t games) {
  FailureRateReport rep;
  rep.games = games;
  for (std::uint64_t g = 0; g < games; ++g) {
    if (run_one_game(g)) ++rep.failures;
  }
  rep.wilson = wilson_interval(rep.failures, games);
  return rep;
}

Point random_hamming_point(std::size_t dim, RngStream& rng) {
  std::vector<int> bits(dim);
  for (auto& b : bits) b = static_cast<int>(rng.next_word() & 1);
  return Point::hamming(bits);
}

Point at_hamming_distance(const Point& base, std::size_t dist,
                          RngStream& rng) {
  if (dist > base.dim()) {
    throw std::invalid_argument("at_hamming_distance: dist > dim");
  }
  Point out = base;
  std::vector<std::size_t> coords(base.dim());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
  for (std::size_t i = 0; i < dist; ++i) {  // partial Fisher-Yates
    const std::size_t j = i + rng.next_below(coords.size() - i);
    std::swap(coords[i], coords[j]);
    out.set_bit(coords[i], !out.bit(coords[i]));
  }
  return out;
}

std::shared_ptr<Dataset> random_hamming_dataset(std::size_t n, std::size_t dim,
                                                RngStream& rng) {
  auto ds = std::make_shared<Dataset>(SpaceMode::kHamming, dim);
  for (std::size_t i = 0; i < n; ++i) {
    ds->append(random_hamming_point(dim, rng));
  }
  return ds;
}

PlantedInstance planted_instance(std::size_t n, std::size_t dim,
                                 const ProblemParams& params,
                                 std::size_t ball_size, RngStream& rng) {
  if (ball_size > n) {
    throw std::invalid_argument("planted_instance: ball_size > n");
  }
  PlantedInstance inst;
  inst.data = std::make_shared<Dataset>(SpaceMode::kHamming, dim);
  inst.query = random_hamming_point(dim, rng);
  const auto r_int = static_cast<std::size_t>(params.r);
  std::vector<Point> chosen;
  for (std::size_t i = 0; i < ball_size; ++i) {
    for (;;) {
      const std::size_t dist = 1 + rng.next_below(std::max<std::size_t>(r_int, 1));
      Point cand = at_hamming_distance(inst.query, dist, rng);
      const bool dup = std::any_of(
          chosen.begin(), chosen.end(),
          [&](const Point& p) { return p == cand; });
      if (!dup) {
        chosen.push_back(cand);
        inst.planted.push_back(inst.data->append(cand));
        break;
      }
    }
  }
  for (std::size_t i = ball_size; i < n; ++i) {
    for (;;) {
      Point cand = random_hamming_point(dim, rng);
      if (distance(cand, inst.query) > params.cr()) {
        inst.data->append(cand);
        break;
      }
    }
  }
  return inst;
}

std::shared_ptr<Dataset> isolated_instance(std::size_t n, std::size_t dim,
                                           std::size_t min_weight,
                                           RngStream& rng) {
  if (min_weight > dim) {
    throw std::invalid_argument("isolated_instance: min_weight > dim");
  }
  auto ds = std::make_shared<Dataset>(SpaceMode::kHamming, dim);
  ds->append(Point::hamming(std::string(dim, '0')));
  const Point origin = ds->point(0);
  while (ds->size() < n) {
    Point cand = random_hamming_point(dim, rng);
    if (distance(cand, origin) >= static_cast<double>(min_weight)) {
      ds->append(cand);
    }
  }
  return ds;
}

}  // namespace robann
