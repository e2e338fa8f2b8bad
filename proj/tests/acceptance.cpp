// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line so the whole gate reads off one screen. Criteria 1 and 5 contain
// literature constants that do not survive independent evaluation; those
// sub-checks are asserted as stated and fail with an explanatory note
// rather than being weakened (see the failure messages).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_lib.hpp"
#include "robann/dp.hpp"
#include "robann/fair.hpp"
#include "robann/forall.hpp"
#include "robann/harness.hpp"
#include "robann/metric.hpp"
#include "robann/robust.hpp"
#include "robann/stats.hpp"

using namespace robann;
namespace fs = std::filesystem;

namespace {

class Criterion {
 public:
  Criterion(int number, const char* title) : number_(number), title_(title) {
    start_ = std::chrono::steady_clock::now();
  }
  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    std::printf("[%s] criterion %02d: %s (%.1fs)\n",
                failures_ == 0 ? "PASS" : "FAIL", number_, title_, secs);
    std::fflush(stdout);
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) ++failures_;
    CHECK_MESSAGE(ok, "criterion " << number_ << ": " << what);
  }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  int number_;
  const char* title_;
  int failures_ = 0;
  std::chrono::steady_clock::time_point start_;
};

ProblemParams make_params(double c, double r, std::uint64_t q,
                          double delta = 0.001) {
  ProblemParams params;
  params.c = c;
  params.r = r;
  params.max_queries = q;
  params.delta = delta;
  return params;
}

bool rel_close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("criterion 01: exponent values") {
  Criterion crit(1, "beta = 1/3 for c = 4 and c = 10 under rho = 1/(2c-1)");
  const auto rep10 = exponent_optimize(10.0, RhoFn::kHammingOpt);
  crit.expect(rep10.beta == 1.0 / 3.0, "beta(10) == 1/3 exactly");

  const auto rep4 = exponent_optimize(4.0, RhoFn::kHammingOpt);
  crit.expect(rep4.beta == 1.0 / 3.0,
              "beta(4) == 1/3 exactly -- the integer minimum of "
              "max(1/(2*4^(1/k)-1), 1/k) is 0.45981... at k = 3 (no integer k "
              "attains 1/3 for c = 4; 1/3 is the l2-exponent value there), so "
              "this stated target is unattainable under rho = 1/(2c-1)");
  crit.expect(crit.elapsed() < 1.0, "runtime < 1s");
}

TEST_CASE("criterion 02: fairness uniformity") {
  Criterion crit(2, "chi-square vs oracle ball on 20 instances, 1e4 trials");
  const auto params = make_params(2.0, 2.0, 100);
  const std::size_t balls[] = {2, 3, 5};
  for (int inst_no = 0; inst_no < 20; ++inst_no) {
    RngStream rng = derive_stream(520001, "c2-inst",
                                  static_cast<std::uint64_t>(inst_no));
    const std::size_t n = 150 + rng.next_below(51);  // n <= 200
    const auto inst =
        planted_instance(n, 16, params, balls[inst_no % 3], rng);
    FairIndex fi(inst.data, params,
                 RngStream::word_at(520001, stream_id("setup", inst_no), 0));
    const auto rep = fairness_test(
        [&](const Point& q, RngStream& qrng) -> std::optional<PointId> {
          const FairAnswer a = fi.query(q, qrng);
          if (a.outcome != QueryOutcome::kFound) return std::nullopt;
          return a.id;
        },
        *inst.data, inst.query, params.r, 10000,
        777000 + static_cast<std::uint64_t>(inst_no));
    crit.expect(!rep.skipped && rep.invalid == 0,
                "instance " + std::to_string(inst_no) + " valid outputs");
    crit.expect(rep.chi.p_value > 0.001,
                "instance " + std::to_string(inst_no) +
                    " p = " + std::to_string(rep.chi.p_value));
  }
  crit.expect(crit.elapsed() < 120.0, "runtime < 2min");
}

TEST_CASE("criterion 03: setup-independence") {
  Criterion crit(3, "pairwise chi-square across 20 setup seeds");
  const auto params = make_params(2.0, 2.0, 100);
  RngStream rng = derive_stream(530001, "c3-inst");
  const auto inst = planted_instance(120, 16, params, 3, rng);
  const auto ball_ids = ball(*inst.data, inst.query, params.r);
  REQUIRE(ball_ids.size() == 3);

  const int setups = 20;
  const int trials = 3000;
  std::vector<std::vector<std::uint64_t>> counts(
      setups, std::vector<std::uint64_t>(ball_ids.size(), 0));
  for (int s = 0; s < setups; ++s) {
    FairIndex fi(inst.data, params,
                 RngStream::word_at(530001, stream_id("setup", s), 0));
    for (int t = 0; t < trials; ++t) {
      RngStream qrng = derive_stream(
          530100 + s, "query", static_cast<std::uint64_t>(t));
      const FairAnswer a = fi.query(inst.query, qrng);
      if (a.outcome != QueryOutcome::kFound) continue;
      const auto it =
          std::lower_bound(ball_ids.begin(), ball_ids.end(), a.id);
      ++counts[s][static_cast<std::size_t>(it - ball_ids.begin())];
    }
  }
  int bad_pairs = 0;
  double worst_p = 1.0;
  for (int a = 0; a < setups; ++a) {
    for (int b = a + 1; b < setups; ++b) {
      const auto rep = chi_square_two_sample(counts[a], counts[b]);
      worst_p = std::min(worst_p, rep.p_value);
      bad_pairs += rep.p_value <= 0.001;
    }
  }
  crit.expect(bad_pairs == 0, "all 190 pairs indistinguishable; worst p = " +
                                  std::to_string(worst_p));
}

TEST_CASE("criterion 04: laplace correctness") {
  Criterion crit(4, "KS < 0.002 over 1e6 draws; max-of-m tail bound at 3sigma");
  RngStream rng = derive_stream(540001, "c4-draws");
  const int n = 1000000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = dp::laplace_sample(1.0, rng);
  std::sort(draws.begin(), draws.end());
  std::vector<double> cdf(n);
  for (int i = 0; i < n; ++i) cdf[i] = dp::laplace_cdf(draws[i], 1.0);
  const double ks = ks_statistic(cdf);
  crit.expect(ks < 0.002, "KS = " + std::to_string(ks));

  const std::pair<int, double> cases[] = {{1, 2.0}, {10, 3.0}, {100, 4.0}};
  for (const auto& [m, t] : cases) {
    RngStream trng = derive_stream(540002, "c4-tail",
                                   static_cast<std::uint64_t>(m));
    const int trials = 20000;
    int exceed = 0;
    const double cutoff = std::log(static_cast<double>(m)) + t;
    for (int trial = 0; trial < trials; ++trial) {
      double mx = -1e300;
      for (int i = 0; i < m; ++i) {
        mx = std::max(mx, dp::laplace_sample(1.0, trng));
      }
      exceed += mx > cutoff;
    }
    const double bound = std::exp(-t);
    const double sigma = std::sqrt(bound * (1 - bound) / trials);
    crit.expect(static_cast<double>(exceed) / trials <= bound + 3.0 * sigma,
                "tail (m=" + std::to_string(m) + ", t=" + std::to_string(t) +
                    ")");
  }
}

TEST_CASE("criterion 05: parameter calculators") {
  Criterion crit(5, "12-digit calculator references; iteration privacy check");

  // advanced composition vs independently computed references
  {
    const auto [e1, d1] = dp::advanced_composition(0.01, 0.0, 5, 0.001);
    crit.expect(rel_close(e1, 0.08411290681345549625), "composition ref 1");
    crit.expect(d1 == 0.001, "composition ref 1 delta");
    const auto [e2, d2] = dp::advanced_composition(0.2, 1e-6, 10, 0.01);
    crit.expect(rel_close(e2, 2.719410364875232483), "composition ref 2");
    crit.expect(rel_close(d2, 0.01001), "composition ref 2 delta");
  }
  // subsampling amplification
  {
    const auto [e1, d1] = dp::subsampling_amplification(0.01, 0.001, 3, 10);
    crit.expect(rel_close(e1, 0.018), "subsampling ref 1 eps");
    crit.expect(rel_close(d1, 0.001221795571667752513), "subsampling ref 1 delta");
    const auto [e2, d2] = dp::subsampling_amplification(0.5, 1e-4, 7, 50);
    crit.expect(rel_close(e2, 0.42), "subsampling ref 2 eps");
    crit.expect(rel_close(d2, 8.522984711464349257e-5), "subsampling ref 2 delta");
  }
  // decider constants
  {
    crit.expect(dp::decider_constants(make_params(2, 1, 1, 0.001)).copies ==
                    61622,
                "L(Q=1, delta=1e-3) == 61622");
    crit.expect(
        dp::decider_constants(make_params(2, 1, 100, 0.001)).copies == 616215,
        "L(Q=100, delta=1e-3) == 616215");
    crit.expect(dp::decider_constants(make_params(2, 1, 100, 0.001))
                        .subsample == 461,
                "k(Q=100, delta=1e-3) == 461");
    crit.expect(dp::decider_constants(make_params(2, 1, 1000, 0.002)).copies ==
                    1662827,
                "L(Q=1000, delta=2e-3) == 1662827");
    crit.expect(dp::decider_constants(make_params(2, 1, 1000, 0.002))
                        .subsample == 525,
                "k(Q=1000, delta=2e-3) == 525");
  }
  // reduced lp exponent
  {
    crit.expect(rel_close(DiscretizedIndex::reduced_rho(2.0), 2.0 / 7.0),
                "rho'(2) == 2/7");
    crit.expect(
        rel_close(DiscretizedIndex::reduced_rho(4.0), 0.08180300500834724541),
        "rho'(4)");
    crit.expect(
        rel_close(DiscretizedIndex::reduced_rho(10.0), 0.02531645569620253165),
        "rho'(10)");
  }
  // the stated iteration-privacy inequality at (Q=1e6, delta=1e-3, eps=0.01)
  {
    const auto chk = dp::iteration_privacy_check(0.01, 1000000, 0.001);
    crit.expect(rel_close(chk.lhs, 2.01779849535155e-6, 1e-11),
                "6k/L reference");
    crit.expect(rel_close(chk.rhs, 1.34519899690103e-6, 1e-11),
                "eps' reference");
    crit.expect(chk.holds,
                "6k/L < eps' at (Q=1e6, delta=1e-3, eps=0.01) -- numerically "
                "6k/L = 2.018e-6 > eps' = 1.345e-6; the requirement reduces "
                "to Q < 1/delta, so it cannot hold at Q = 1e6, delta = 1e-3 "
                "(it does hold for every Q < 1000 at this delta)");
  }
}

TEST_CASE("criterion 06: robust decider accuracy over adaptive games") {
  Criterion crit(6, "1e3 replay-worst games at L=64, k=64, Q=100");
  const auto params = make_params(2.0, 2.0, 100);
  DeciderConfig cfg;
  cfg.copies = 64;
  cfg.subsample = 64;
  const auto report = failure_rate(
      [&](std::uint64_t g) {
        RngStream rng = derive_stream(560001, "c6-data", g);
        const auto inst = planted_instance(64, 16, params, 1, rng);
        DeciderSearcher searcher(
            inst.data, params, cfg,
            RngStream::word_at(560001, stream_id("setup", g), 0));
        ReplayWorstAdversary adv(g);
        GameOptions opt;
        opt.rounds = 100;
        opt.seed = 560001;
        opt.game_ordinal = g;
        return run_game(inst.data, params, searcher, adv, opt).adversary_won;
      },
      1000);
  crit.expect(report.wilson.high <= 0.05,
              "per-game error rate " + std::to_string(report.wilson.estimate) +
                  " with Wilson CI high " +
                  std::to_string(report.wilson.high));
  crit.expect(crit.elapsed() < 600.0, "runtime < 10min");
}

TEST_CASE("criterion 07: bucketing end-to-end") {
  Criterion crit(7, "100 planted instances at n=1024, d=32");
  const auto params = make_params(2.0, 2.0, 100000);
  BucketedConfig cfg;
  cfg.decider.copies = 8;
  cfg.decider.subsample = 24;
  int misses = 0;
  int invalid = 0;
  for (int t = 0; t < 100; ++t) {
    RngStream rng = derive_stream(570001, "c7-data",
                                  static_cast<std::uint64_t>(t));
    const auto inst = planted_instance(1024, 32, params, 1, rng);
    BucketedIndex idx(inst.data, params, cfg,
                      RngStream::word_at(570001, stream_id("setup", t), 0));
    RngStream qrng = derive_stream(570002, "query",
                                   static_cast<std::uint64_t>(t));
    const auto hit = idx.query(inst.query, qrng);
    if (!hit) {
      ++misses;
      continue;
    }
    if (distance(inst.data->point(*hit), inst.query) > params.cr()) ++invalid;
  }
  crit.expect(invalid == 0, "every non-bottom answer within cr");
  crit.expect(misses <= 5, "bottom-miss rate " + std::to_string(misses) + "%");
}

TEST_CASE("criterion 08: telescoping property") {
  Criterion crit(8, "density-ratio annulus exists on 1e3 instances, k in 2..4");
  const auto params = make_params(4.0, 2.0, 10);
  RngStream rng = derive_stream(580001, "c8");
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 16 + rng.next_below(64);
    const auto inst =
        planted_instance(n, 16, params, 1 + rng.next_below(3), rng);
    const double nn = static_cast<double>(inst.data->size());
    for (const std::uint32_t k : {2, 3, 4}) {
      const double cp = std::pow(params.c, 1.0 / k);
      bool found = false;
      double r_lo = params.r;
      for (std::uint32_t j = 0; j < k && !found; ++j) {
        const double r_hi = r_lo * cp;
        const auto lo = ball(*inst.data, inst.query, r_lo).size();
        const auto hi = ball(*inst.data, inst.query, r_hi).size();
        found = static_cast<double>(hi) <=
                std::pow(nn, 1.0 / k) * static_cast<double>(lo);
        r_lo = r_hi;
      }
      violations += !found;
    }
  }
  crit.expect(violations == 0, "zero violations over 3000 checks");
}

TEST_CASE("criterion 09: annuli detection at scaled thresholds") {
  Criterion crit(9, "good-annulus detection vs 1e5-sample ground truth");
  const auto params = make_params(4.0, 2.0, 200);
  const std::uint32_t annuli = 2;
  const double eta = 0.05;
  const double p_star = 0.9;

  // two instance families: fast (planted ball) and slow (dense shell)
  RngStream data_rng = derive_stream(590001, "c9-data");
  const auto fast_inst = planted_instance(64, 16, params, 2, data_rng);
  auto slow_ds = std::make_shared<Dataset>(SpaceMode::kHamming, 16);
  const Point slow_q = random_hamming_point(16, data_rng);
  while (slow_ds->size() < 64) {
    // points in the (r1, cr] shell keep every annulus instance grinding
    const std::size_t dist = 5 + data_rng.next_below(4);  // 5..8, cr = 8
    slow_ds->append(at_hamming_distance(slow_q, dist, data_rng));
  }

  AnnuliConfig cfg;
  cfg.annuli = annuli;
  cfg.eta = eta;
  cfg.p_star = p_star;
  cfg.pool = 24;
  cfg.probes = 64;

  struct Setup {
    const char* name;
    std::unique_ptr<AnnuliIndex> idx;
    const Point* query;
    std::vector<double> truth;
  };
  std::vector<Setup> setups;
  setups.push_back({"fast",
                    std::make_unique<AnnuliIndex>(fast_inst.data, params, cfg,
                                                  901),
                    &fast_inst.query,
                    {}});
  setups.push_back(
      {"slow", std::make_unique<AnnuliIndex>(slow_ds, params, cfg, 902),
       &slow_q,
       {}});

  // ground truth: 1e5 truncated runs per annulus of the probe procedure
  for (auto& s : setups) {
    for (std::uint32_t j = 0; j < annuli; ++j) {
      RngStream grng = derive_stream(590002, "c9-truth", j);
      const std::uint64_t budget_units = s.idx->trunc_budget(j);
      std::uint64_t finished = 0;
      const int runs = 100000;
      for (int i = 0; i < runs; ++i) {
        const auto pick = grng.next_below(s.idx->pool_size());
        RngStream run_rng = grng.split(stream_id("run", i));
        WorkBudget wb(budget_units);
        const FairAnswer a =
            s.idx->pool_instance(j, pick).query(*s.query, run_rng, &wb);
        finished += a.outcome != QueryOutcome::kTimeout;
      }
      s.truth.push_back(static_cast<double>(finished) / runs);
    }
    INFO(s.name << " truth: " << s.truth[0] << ", " << s.truth[1]);
  }

  // 1e3 trials of the (s = 64)-probe noisy detection per family
  int agree_trials = 0;
  int sup_ok_trials = 0;  // the s = 160 estimate-accuracy variant
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto& s = setups[t % 2];
    bool all_agree = true;
    bool sup_ok = true;
    RngStream trng = derive_stream(590003, "c9-trial",
                                   static_cast<std::uint64_t>(t));
    for (std::uint32_t j = 0; j < annuli; ++j) {
      const std::uint64_t budget_units = s.idx->trunc_budget(j);
      const auto run_probe = [&](std::uint64_t probes) {
        std::uint64_t finished = 0;
        for (std::uint64_t i = 0; i < probes; ++i) {
          const auto pick = trng.next_below(s.idx->pool_size());
          RngStream run_rng = trng.split(stream_id("probe", i));
          WorkBudget wb(budget_units);
          const FairAnswer a =
              s.idx->pool_instance(j, pick).query(*s.query, run_rng, &wb);
          finished += a.outcome != QueryOutcome::kTimeout;
        }
        return static_cast<double>(finished) / static_cast<double>(probes);
      };
      // detection at s = 64
      {
        const double phat =
            run_probe(64) + dp::laplace_sample(1.0 / 64.0, trng);
        const bool flagged = phat >= p_star;
        const double truth = s.truth[j];
        if (truth >= p_star + eta && !flagged) all_agree = false;
        if (truth < p_star - eta && flagged) all_agree = false;
      }
      // estimate accuracy at scaled s = 160
      {
        const double phat =
            run_probe(160) + dp::laplace_sample(1.0 / 160.0, trng);
        if (std::abs(phat - s.truth[j]) > eta) sup_ok = false;
      }
    }
    agree_trials += all_agree;
    sup_ok_trials += sup_ok;
  }
  crit.expect(agree_trials >= 990,
              "detection agreement on " + std::to_string(agree_trials) +
                  "/1000 trials");
  crit.expect(sup_ok_trials >= 990,
              "sup-norm estimate error <= eta on " +
                  std::to_string(sup_ok_trials) + "/1000 trials (s = 160)");

  // full queries: non-bottom answers always within cr
  for (auto& s : setups) {
    for (int t = 0; t < 100; ++t) {
      RngStream qrng = derive_stream(590004, "c9-query",
                                     static_cast<std::uint64_t>(t));
      const auto res = s.idx->query(*s.query, qrng);
      if (res.id) {
        crit.expect(
            distance(s.idx->execution(0).dataset()->point(*res.id), *s.query) <=
                params.cr(),
            "non-bottom answer within cr");
      }
    }
  }
}

TEST_CASE("criterion 10: for-all exhaustive check") {
  Criterion crit(10, "all 2^d queries correct in >= 99/100 builds, d in {6,8}");
  for (const std::size_t d : {std::size_t{6}, std::size_t{8}}) {
    const auto params = make_params(2.0, 1.0, 100);
    int perfect = 0;
    for (int b = 0; b < 100; ++b) {
      RngStream rng = derive_stream(600001 + d, "c10-data",
                                    static_cast<std::uint64_t>(b));
      const auto ds = random_hamming_dataset(32, d, rng);
      ForAllHammingIndex idx(
          ds, params, {},
          RngStream::word_at(600001 + d, stream_id("build", b), 0));
      bool all_ok = true;
      std::vector<int> bits(d, 0);
      for (std::uint64_t mask = 0; mask < (1ULL << d) && all_ok; ++mask) {
        for (std::size_t i = 0; i < d; ++i) bits[i] = (mask >> i) & 1;
        const Point q = Point::hamming(bits);
        const auto hit = idx.query(q);
        const auto v = oracle_ann_verdicts(*ds, q, params);
        all_ok = hit ? v.point_correct(*hit) : v.bottom_correct();
      }
      perfect += all_ok;
    }
    crit.expect(perfect >= 99, "d = " + std::to_string(d) + ": " +
                                   std::to_string(perfect) + "/100 builds");
  }
  crit.expect(crit.elapsed() < 300.0, "runtime < 5min");
}

TEST_CASE("criterion 11: covering soundness") {
  Criterion crit(11, "1e4 snaps within delta; grid bound matches closed form");
  const struct {
    double C, delta, p;
    std::size_t d;
  } grids[] = {{1.0, 0.5, 2.0, 2}, {4.0, 1.0, 1.0, 3}, {2.0, 0.8, 3.0, 2}};
  RngStream rng = derive_stream(610001, "c11");
  for (const auto& g : grids) {
    const auto cov = Covering::grid(g.C, g.delta, g.p, g.d, 1e18);
    int violations = 0;
    for (int t = 0; t < 10000; ++t) {
      std::vector<double> coords(g.d);
      for (auto& x : coords) x = (rng.next_double() * 2.0 - 1.0) * g.C;
      const Point q = Point::real(coords);
      const auto snapped = cov.snap(q);
      if (!snapped || distance(*snapped, q, g.p) > g.delta) ++violations;
    }
    crit.expect(violations == 0, "zero snap violations");
    const double expected =
        static_cast<double>(g.d) *
        std::log(2.0 * g.C * std::pow(static_cast<double>(g.d), 1.0 / g.p) /
                 g.delta);
    crit.expect(rel_close(cov.log_size_bound(), expected),
                "log grid bound matches (2 C d^(1/p) / delta)^d");
  }
}

TEST_CASE("criterion 12: adversary demonstration") {
  Criterion crit(12, "bucket prober: >= 50% vs single-table, <= 5% vs fair");
  const auto params = make_params(2.0, 2.0, 1000);
  const std::size_t n = 256;
  const std::size_t d = 32;
  const int games = 40;

  const auto classic = failure_rate(
      [&](std::uint64_t g) {
        RngStream rng = derive_stream(620001, "c12-data", g);
        const auto ds = isolated_instance(n, d, 10, rng);
        ClassicSearcher searcher(
            ds, params, RngStream::word_at(620001, stream_id("setup", g), 0),
            1);
        BucketProberAdversary adv(g);
        GameOptions opt;
        opt.rounds = 1000;
        opt.seed = 620001;
        opt.game_ordinal = g;
        return run_game(ds, params, searcher, adv, opt).adversary_won;
      },
      games);
  crit.expect(classic.wilson.estimate >= 0.5,
              "single-table win rate " +
                  std::to_string(classic.wilson.estimate));

  const auto fair = failure_rate(
      [&](std::uint64_t g) {
        RngStream rng = derive_stream(620002, "c12-data", g);
        const auto ds = isolated_instance(n, d, 10, rng);
        FairSearcher searcher(
            ds, params, RngStream::word_at(620002, stream_id("setup", g), 0));
        BucketProberAdversary adv(g);
        GameOptions opt;
        opt.rounds = 1000;
        opt.seed = 620002;
        opt.game_ordinal = g;
        return run_game(ds, params, searcher, adv, opt).adversary_won;
      },
      games);
  crit.expect(fair.wilson.estimate <= 0.05,
              "fair win rate " + std::to_string(fair.wilson.estimate));
}

TEST_CASE("criterion 13: determinism of experiment outputs") {
  Criterion crit(13, "equal seeds give byte-identical CSV/JSON");
  const auto base = fs::temp_directory_path() / "robann-acceptance-det";
  fs::remove_all(base);
  fs::create_directories(base);
  const auto cfg_path = base / "exp.cfg";
  {
    std::ofstream out(cfg_path);
    out << "kind = decider-accuracy\n"
           "[dataset]\nsource = planted\nn = 48\ndim = 16\nball = 1\n"
           "[problem]\nc = 2\nr = 2\nQ = 25\n"
           "[searcher]\ntype = decider\n"
           "[adversary]\ntype = replay_worst\n"
           "[overrides]\ndecider.copies = 8\ndecider.subsample = 8\n"
           "[run]\nseed = 4242\ngames = 6\nrounds = 25\n";
  }
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  for (const char* exp : {"a", "b"}) {
    std::string out;
    std::string err;
    const int rc = cli::run_cli(
        {"run", cfg_path.string(), "--out", (base / exp).string()}, out, err);
    crit.expect(rc == 0, "experiment run " + std::string(exp) + " ok");
  }
  crit.expect(slurp(base / "a" / "summary.json") ==
                  slurp(base / "b" / "summary.json"),
              "summary.json byte-identical");
  crit.expect(slurp(base / "a" / "transcript.tsv") ==
                  slurp(base / "b" / "transcript.tsv"),
              "transcript.tsv byte-identical");

  for (const char* exp : {"ba", "bb"}) {
    std::string out;
    std::string err;
    const int rc = cli::run_cli({"beta", "--c-min", "2", "--c-max", "20",
                                 "--step", "0.5", "--rho", "both", "--out",
                                 (base / exp).string()},
                                out, err);
    crit.expect(rc == 0, "beta run " + std::string(exp) + " ok");
  }
  crit.expect(slurp(base / "ba" / "beta.csv") ==
                  slurp(base / "bb" / "beta.csv"),
              "beta.csv byte-identical");
}
