#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "expertroute/harness.hpp"
#include "expertroute/models.hpp"
#include "expertroute/routing.hpp"

using namespace expertroute;

namespace {

ExpertNetwork path_network(std::int64_t lambda) {
  auto c = ModelConfig::diversified(1, lambda, 1, 0.0, 0);
  c.no_long_range = true;
  return build_network(c);
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

bool is_contact(const ExpertNetwork& net, ExpertId u, ExpertId w) {
  for (ExpertId x : net.local_contacts()[u]) {
    if (x == w) return true;
  }
  for (ExpertId x : net.long_range_contacts()[u]) {
    if (x == w) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("routing") {

TEST_CASE("next hop picks the strictly best score") {
  const ExpertNetwork net = path_network(5);
  // expert at level 3 (id 2) sees levels 2 and 4
  CHECK(next_hop(2, Query{1, 5}, net, 5) == 3);
  CHECK(next_hop(2, Query{1, 5}, net, 5, TieBreak::kHighestSkill) == 3);
}

TEST_CASE("tie policies at a saturated score") {
  // Holder at level 5 with local contacts at 4 and 6, long-range at 8 and 9.
  auto c = ModelConfig::diversified(1, 10, 2, 0.0, 0);
  std::vector<std::vector<ExpertId>> lr(10);
  lr[4] = {7, 8};
  const ExpertNetwork net = assemble_network(c, diversified_experts(1, 10), Adjacency(lr));
  const Query q{1, 7};
  CHECK(next_hop(4, q, net, 7, TieBreak::kHighestSkill) == 8);
  CHECK(next_hop(4, q, net, 7, TieBreak::kClosestAbove) == 7);
  // Below saturation both agree: best score wins.
  CHECK(next_hop(4, q, net, 10, TieBreak::kClosestAbove) == 8);
  // Misread equal to the holder's own level: prefer an upward contact.
  CHECK(next_hop(4, q, net, 5, TieBreak::kClosestAbove) == 5);
}

TEST_CASE("equal vectors tie on id") {
  auto c = ModelConfig::unified(8, 2, 1, 0.0, 0);
  c.no_long_range = true;
  const ExpertNetwork net = build_network(c);
  // id 0 sees ids 1 and 5 with vector [1,2], and its column peer 4.
  CHECK(next_hop(0, Query{1, 1}, net, 1) == 1);
  CHECK(next_hop(0, Query{1, 1}, net, 1, TieBreak::kHighestSkill) == 1);
}

TEST_CASE("contactless expert is a structural error") {
  const auto c = ModelConfig::diversified(1, 2, 1, 0.0, 0);
  const ExpertNetwork net(c, diversified_experts(1, 2), Adjacency(std::vector<std::vector<ExpertId>>(2)), Adjacency(std::vector<std::vector<ExpertId>>(2)));
  CHECK_THROWS_AS(next_hop(0, Query{1, 2}, net, 2), InvalidInput);
}

TEST_CASE("route examples") {
  const ExpertNetwork path = path_network(5);
  const RouteResult r = route(Query{1, 4}, 0, path);
  CHECK(r.path == std::vector<ExpertId>{0, 1, 2, 3});
  CHECK(r.hops == 3);
  CHECK(r.status == RouteStatus::kResolved);

  const RouteResult solved = route(Query{1, 2}, 3, path);
  CHECK(solved.path == std::vector<ExpertId>{3});
  CHECK(solved.hops == 0);

  auto c = ModelConfig::unified(8, 2, 1, 0.0, 0);
  c.no_long_range = true;
  const ExpertNetwork uni = build_network(c);
  CHECK(route(Query{1, 3}, 0, uni).hops == 3);
  CHECK(route(Query{1, 3}, 4, uni).hops == 3);
}

TEST_CASE("route argument errors") {
  const ExpertNetwork path = path_network(5);
  SplitMix64 rng(1);
  CHECK_THROWS_AS(route(Query{1, 4}, 9, path), InvalidInput);
  CHECK_THROWS_AS(route(Query{2, 4}, 0, path), InvalidInput);
  CHECK_THROWS_AS(route(Query{1, 4}, 0, path, ErrorModel{-1.0}, rng), InvalidInput);
}

TEST_CASE("hop cap aborts a cycling route") {
  // Experts 0 and 1 point only at each other; the qualified expert 2 is unreachable.
  const auto c = ModelConfig::diversified(1, 3, 1, 0.0, 0);
  const ExpertTable t(1, {1, 1, 2});
  const ExpertNetwork net(c, t, Adjacency({{1}, {0}, {0}}), Adjacency({{}, {}, {}}));
  const RouteResult r = route(Query{1, 2}, 0, net);
  CHECK(r.status == RouteStatus::kAbortedHopCap);
  CHECK(r.hops == 3);
}

TEST_CASE("misread difficulty") {
  SplitMix64 rng(5);
  CHECK(sample_misread_tau(3, 9, 0.0, rng) == 9);
  CHECK(sample_misread_tau(9, 9, 2.0, rng) == 9);
  CHECK_THROWS_AS(sample_misread_tau(3, 9, -0.1, rng), InvalidInput);

  SplitMix64 probe(5);
  CHECK(probe() == rng());  // c == 0 consumed nothing
}

TEST_CASE("truncated normal moments") {
  // mean tau, sigma 1, truncation one sigma below the mean
  const double tau = 10.0, sigma = 1.0, lower = 9.0;
  const double alpha = (lower - tau) / sigma;
  const double z = 1.0 - Phi(alpha);
  const double mean = tau + sigma * phi(alpha) / z;
  const double var = sigma * sigma * (1.0 + alpha * phi(alpha) / z - std::pow(phi(alpha) / z, 2));

  SplitMix64 rng(77);
  const int draws = 1000000;
  double sum = 0.0, sum_sq = 0.0, lowest = 1e300;
  std::int64_t int_sum = 0;
  Level int_lowest = 1000;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_truncated_normal(tau, sigma, lower, rng);
    sum += x;
    sum_sq += x * x;
    lowest = std::min(lowest, x);
    const Level t = sample_misread_tau(9, 10, 1.0, rng);
    int_sum += t;
    int_lowest = std::min(int_lowest, t);
  }
  const double m = sum / draws;
  CHECK(m == doctest::Approx(mean).epsilon(5e-4));
  CHECK(sum_sq / draws - m * m == doctest::Approx(var).epsilon(5e-3));
  CHECK(lowest >= lower);
  CHECK(int_lowest >= 9);
  CHECK(static_cast<double>(int_sum) / draws == doctest::Approx(mean).epsilon(0.01));
}

TEST_CASE("truncation far above the mean stays finite") {
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_truncated_normal(0.0, 1.0, 12.0, rng);
    CHECK(std::isfinite(x));
    CHECK(x >= 12.0);
  }
  CHECK(sample_truncated_normal(4.0, 0.0, 1.0, rng) == 4.0);
}

TEST_CASE("route invariants across models, policies and error levels") {
  for (const ModelConfig& base :
       {ModelConfig::unified(120, 4, 2, 0.5, 8), ModelConfig::unified(60, 6, 1, 2.5, 9),
        ModelConfig::diversified(2, 9, 1, 1.0, 10), ModelConfig::diversified(3, 5, 3, 3.0, 11)}) {
    const ExpertNetwork net = build_network(base);
    const std::int64_t side = base.side();
    for (TieBreak tie : {TieBreak::kClosestAbove, TieBreak::kHighestSkill}) {
      for (double c : {0.0, 0.5, 2.0}) {
        SplitMix64 rng(derive_seed(base.seed, {static_cast<std::uint64_t>(c * 10)}));
        for (int trial = 0; trial < 400; ++trial) {
          const Query q = gen_query(base, rng);
          const auto start = static_cast<ExpertId>(rng.below(net.size()));
          const RouteResult r = route(q, start, net, ErrorModel{c}, rng, tie);
          REQUIRE(r.status == RouteStatus::kResolved);
          CHECK(r.hops == static_cast<std::int64_t>(r.path.size()) - 1);
          CHECK(r.hops <= side - 1);
          CHECK(net.experts().level(r.path.back(), q.area_index()) >= q.tau);
          std::set<ExpertId> seen(r.path.begin(), r.path.end());
          CHECK(seen.size() == r.path.size());
          for (std::size_t i = 1; i < r.path.size(); ++i) {
            CHECK(is_contact(net, r.path[i - 1], r.path[i]));
            CHECK(net.experts().level(r.path[i], q.area_index()) >
                  net.experts().level(r.path[i - 1], q.area_index()));
          }
        }
      }
    }
  }
}

TEST_CASE("zero error matches exact mode without touching the stream") {
  const ExpertNetwork net = build_network(ModelConfig::unified(240, 4, 1, 1.0, 3));
  SplitMix64 gen(8);
  for (int trial = 0; trial < 500; ++trial) {
    const Query q = gen_query(net.config(), gen);
    const auto start = static_cast<ExpertId>(gen.below(net.size()));
    SplitMix64 rng(trial), untouched(trial);
    const RouteResult a = route(q, start, net, ErrorModel{0.0}, rng);
    const RouteResult b = route(q, start, net);
    CHECK(a.path == b.path);
    CHECK(rng() == untouched());
    CHECK(route(q, start, net, TieBreak::kHighestSkill).hops == b.hops);
  }
}

}  // TEST_SUITE
