#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "robann/fair.hpp"
#include "robann/harness.hpp"
#include "robann/metric.hpp"

using namespace robann;

namespace {

ProblemParams params16(std::uint64_t q = 100) {
  ProblemParams params;
  params.c = 2.0;
  params.r = 2.0;
  params.max_queries = q;
  params.delta = 0.001;
  return params;
}

}  // namespace

TEST_CASE("work budget pins spent at the limit") {
  WorkBudget wb(10);
  CHECK(wb.charge(4));
  CHECK(wb.charge(4));
  CHECK(wb.spent() == 8);
  CHECK_FALSE(wb.charge(4));  // would exceed
  CHECK(wb.spent() == 10);
  CHECK(wb.exhausted());
}

TEST_CASE("singleton ball is returned except for rare setup misses") {
  const auto params = params16();
  RngStream rng(101, stream_id("fair-single", 0));
  const auto inst = planted_instance(60, 16, params, 1, rng);
  const int setups = 300;
  int hits = 0;
  for (int s = 0; s < setups; ++s) {
    FairIndex fi(inst.data, params, 4000 + static_cast<std::uint64_t>(s));
    RngStream qrng = derive_stream(999, "query", static_cast<std::uint64_t>(s));
    const FairAnswer a = fi.query(inst.query, qrng);
    if (a.outcome == QueryOutcome::kFound) {
      CHECK(a.id == inst.planted[0]);
      ++hits;
    }
  }
  // miss probability is at most 1/(nQ) = 1/6000 per setup
  CHECK(hits >= setups - 3);
}

TEST_CASE("empty balls answer bottom") {
  const auto params = params16();
  auto ds = std::make_shared<Dataset>(SpaceMode::kHamming, 16);
  ds->append(Point::hamming("1111111111111111"));
  FairIndex fi(ds, params, 5);
  RngStream qrng = derive_stream(7, "query", 0);
  const FairAnswer a = fi.query(Point::hamming("0000000000000000"), qrng);
  CHECK(a.outcome == QueryOutcome::kNotFound);
}

TEST_CASE("uniformity over a 3-point ball passes chi-square") {
  const auto params = params16();
  RngStream rng(102, stream_id("fair-chi", 0));
  const auto inst = planted_instance(80, 16, params, 3, rng);
  FairIndex fi(inst.data, params, 2025);
  const auto rep = fairness_test(
      [&](const Point& q, RngStream& qrng) -> std::optional<PointId> {
        const FairAnswer a = fi.query(q, qrng);
        if (a.outcome != QueryOutcome::kFound) return std::nullopt;
        return a.id;
      },
      *inst.data, inst.query, params.r, 10000, 31337);
  REQUIRE_FALSE(rep.skipped);
  CHECK(rep.invalid == 0);
  CHECK(rep.chi.p_value > 0.001);
}

TEST_CASE("every found answer lies inside the r ball") {
  const auto params = params16();
  RngStream rng(103, stream_id("fair-valid", 0));
  const auto inst = planted_instance(100, 16, params, 5, rng);
  FairIndex fi(inst.data, params, 11);
  for (int t = 0; t < 2000; ++t) {
    RngStream qrng = derive_stream(555, "query", static_cast<std::uint64_t>(t));
    const FairAnswer a = fi.query(inst.query, qrng);
    if (a.outcome == QueryOutcome::kFound) {
      CHECK(distance(inst.data->point(a.id), inst.query) <= params.r);
    }
  }
}

TEST_CASE("setup seeds do not shift the output distribution") {
  const auto params = params16();
  RngStream rng(104, stream_id("fair-setup", 0));
  const auto inst = planted_instance(60, 16, params, 3, rng);
  const auto ball_ids = ball(*inst.data, inst.query, params.r);
  REQUIRE(ball_ids.size() == 3);

  const int setups = 4;
  const int trials = 4000;
  std::vector<std::vector<std::uint64_t>> counts(
      setups, std::vector<std::uint64_t>(ball_ids.size(), 0));
  for (int s = 0; s < setups; ++s) {
    FairIndex fi(inst.data, params, 900 + static_cast<std::uint64_t>(s));
    for (int t = 0; t < trials; ++t) {
      RngStream qrng = derive_stream(
          12000 + s, "query", static_cast<std::uint64_t>(t));
      const FairAnswer a = fi.query(inst.query, qrng);
      REQUIRE(a.outcome == QueryOutcome::kFound);
      const auto it =
          std::lower_bound(ball_ids.begin(), ball_ids.end(), a.id);
      REQUIRE(it != ball_ids.end());
      ++counts[s][static_cast<std::size_t>(it - ball_ids.begin())];
    }
  }
  for (int a = 0; a < setups; ++a) {
    for (int b = a + 1; b < setups; ++b) {
      const auto rep = chi_square_two_sample(counts[a], counts[b]);
      CHECK(rep.p_value > 0.001);
    }
  }
}

TEST_CASE("budget exhaustion reports timeout with spent == limit") {
  const auto params = params16();
  RngStream rng(105, stream_id("fair-budget", 0));
  const auto inst = planted_instance(60, 16, params, 2, rng);
  FairIndex fi(inst.data, params, 3);
  WorkBudget tiny(3);  // cannot even hash the tables
  RngStream qrng = derive_stream(1, "query", 0);
  const FairAnswer a = fi.query(inst.query, qrng, &tiny);
  CHECK(a.outcome == QueryOutcome::kTimeout);
  CHECK(tiny.spent() == tiny.limit());
  CHECK(a.charge == tiny.limit());
}

TEST_CASE("work accounting reproduces across equal seeds") {
  const auto params = params16();
  RngStream rng(106, stream_id("fair-work", 0));
  const auto inst = planted_instance(60, 16, params, 2, rng);
  FairIndex fi(inst.data, params, 8);
  for (int t = 0; t < 50; ++t) {
    RngStream q1 = derive_stream(42, "query", static_cast<std::uint64_t>(t));
    RngStream q2 = derive_stream(42, "query", static_cast<std::uint64_t>(t));
    const FairAnswer a = fi.query(inst.query, q1);
    const FairAnswer b = fi.query(inst.query, q2);
    CHECK(a.charge == b.charge);
    CHECK(a.outcome == b.outcome);
    CHECK(a.id == b.id);
  }
}

TEST_CASE("oblivious updates keep fairness and bottom semantics") {
  const auto params = params16();
  RngStream rng(107, stream_id("fair-upd", 0));
  const auto inst = planted_instance(50, 16, params, 2, rng);
  FairIndex fi(inst.data, params, 21);

  SUBCASE("insert then re-verify uniformity on the mutated set") {
    const Point extra = at_hamming_distance(inst.query, 1, rng);
    fi.insert(extra);
    const auto rep = fairness_test(
        [&](const Point& q, RngStream& qrng) -> std::optional<PointId> {
          const FairAnswer a = fi.query(q, qrng);
          if (a.outcome != QueryOutcome::kFound) return std::nullopt;
          return a.id;
        },
        *inst.data, inst.query, params.r, 8000, 91);
    REQUIRE_FALSE(rep.skipped);
    REQUIRE(rep.ball_ids.size() == 3);
    CHECK(rep.invalid == 0);
    CHECK(rep.chi.p_value > 0.001);
  }

  SUBCASE("deleting the whole r-ball forces bottom") {
    for (const auto id : inst.planted) fi.erase(id);
    RngStream qrng = derive_stream(2, "query", 0);
    const FairAnswer a = fi.query(inst.query, qrng);
    CHECK(a.outcome == QueryOutcome::kNotFound);
  }

  SUBCASE("insert/delete no-op preserves the index bit-for-bit") {
    const std::string before = fi.index().serialize();
    const Point extra = random_hamming_point(16, rng);
    const PointId id = fi.insert(extra);
    fi.erase(id);
    CHECK(fi.index().serialize() == before);
  }
}
