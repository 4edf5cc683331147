#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "verdant/error.hpp"
#include "verdant/scoring.hpp"

using namespace verdant;
using namespace verdant::scoring;

namespace {

TreeRecord tree(std::string id, Point p, double canopy, std::string species = "Sp") {
  TreeRecord t;
  t.id = std::move(id);
  t.position = p;
  t.species = std::move(species);
  t.height_m = 10;
  t.girth_cm = 100;
  t.canopy_diameter_m = canopy;
  return t;
}

std::vector<SegmentAttributes> random_population(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0, 500);
  std::uniform_int_distribution<int> k(0, 6);
  std::vector<SegmentAttributes> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& a = v[static_cast<std::size_t>(i)];
    a.segment_id = "s" + std::to_string(i);
    // a third of the network has no trees at all
    if (i % 3 == 0) continue;
    a.canopy_area_m2 = u(rng);
    a.co2_kg = u(rng) * 3;
    a.species_count = k(rng);
  }
  return v;
}

}  // namespace

TEST_CASE("segment attribute aggregation") {
  RoadNetwork roads;
  roads.segments.push_back(testing::segment("a", {{0, 0}, {100, 0}}));
  roads.segments.push_back(testing::segment("b", {{0, 20}, {100, 20}}));
  roads.segments.push_back(testing::segment("c", {{500, 500}, {600, 500}}));

  const std::vector<TreeRecord> trees{tree("near", {50, 5}, 4), tree("far", {50, -11}, 4),
                                      tree("mid", {30, 10}, 2, "Other")};
  const std::vector<double> co2{100, 200, 50};
  const auto attrs = aggregate_segment_attributes(trees, co2, roads);
  REQUIRE(attrs.size() == 3);
  // "near" is 5 m from a and 15 m from b; "mid" is exactly 10 m from both.
  CHECK(attrs[0].canopy_area_m2 == doctest::Approx(std::numbers::pi * 4 + std::numbers::pi).epsilon(1e-12));
  CHECK(attrs[0].co2_kg == 150);
  CHECK(attrs[0].species_count == 2);
  CHECK(attrs[0].tree_count == 2);
  CHECK(attrs[1].canopy_area_m2 == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(attrs[1].tree_count == 1);
  CHECK(attrs[2].canopy_area_m2 == 0);
  CHECK(attrs[2].co2_kg == 0);
  CHECK(attrs[2].species_count == 0);

  const auto solo = aggregate_segment_attributes(std::vector<TreeRecord>{tree("near", {50, 5}, 4)},
                                                 std::vector<double>{1}, roads);
  CHECK(solo[0].canopy_area_m2 == doctest::Approx(12.566).epsilon(1e-4));

  CHECK_THROWS_AS(aggregate_segment_attributes(trees, std::vector<double>{1}, roads), Error);
}

TEST_CASE("aggregation matches a brute-force scan") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1000);
  std::vector<TreeRecord> trees;
  std::vector<double> co2;
  for (int i = 0; i < 400; ++i) {
    trees.push_back(tree("t" + std::to_string(i), {u(rng), u(rng)}, u(rng) / 100, "S" + std::to_string(i % 7)));
    co2.push_back(u(rng));
  }
  const auto roads = testing::grid_network(8, 8, 140, {5, 5});
  const auto attrs = aggregate_segment_attributes(trees, co2, roads, 10);
  for (std::size_t s = 0; s < roads.segments.size(); ++s) {
    double canopy = 0, c = 0;
    std::set<std::string> species;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto& g = roads.segments[s].geometry;
      if (point_segment_distance(trees[i].position, g[0], g[1]) <= 10) {
        canopy += M_PI * std::pow(trees[i].canopy_diameter_m / 2, 2);
        c += co2[i];
        species.insert(trees[i].species);
      }
    }
    CHECK(attrs[s].canopy_area_m2 == doctest::Approx(canopy).epsilon(1e-12));
    CHECK(attrs[s].co2_kg == doctest::Approx(c).epsilon(1e-12));
    CHECK(attrs[s].species_count == static_cast<double>(species.size()));
  }
}

TEST_CASE("quantile transform examples") {
  const auto q = quantile_transform(std::vector<double>{10, 20, 30, 40});
  CHECK(q[2] == 0.625);
  for (double v : quantile_transform(std::vector<double>{3, 3, 3, 3})) CHECK(v == 0.5);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(100);
  for (auto& x : v) x = u(rng);
  const auto s = quantile_transform(v);
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) CHECK(s[order[i]] > s[order[i - 1]]);
  CHECK(s[order.back()] == (100 - 0.5) / 100);
}

TEST_CASE("score arithmetic") {
  CHECK(seq_score(ComponentScores{1.0, 0.5, 0.0}) == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(serenity_score(ComponentScores{1.0, 0.9, 0.0}) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(serenity_score(ComponentScores{0.5, 0.1, 0.5}) == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937_64 rng(4);
  auto pop = random_population(rng, 60);
  for (const auto& a : pop) {
    const auto c = component_scores(a, Population(pop));
    CHECK(seq_score(a, pop, SeqWeights{1, 0, 0}) == c.canopy);
    CHECK(c.canopy == testing::oracle_midrank(Population(pop).canopy, a.canopy_area_m2));
  }

  // all-zero segment is the minimum of a population with positive values
  const auto scores = score_segments(pop);
  double min_seq = 1;
  for (const auto& s : scores) min_seq = std::min(min_seq, s.seq);
  CHECK(scores[0].seq == min_seq);

  // serenity ignores carbon
  auto perturbed = pop;
  perturbed[4].co2_kg *= 50;
  perturbed[7].co2_kg = 0;
  const auto p = score_segments(perturbed);
  for (std::size_t i = 0; i < pop.size(); ++i) CHECK(p[i].serenity == scores[i].serenity);
}

TEST_CASE("score properties") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> w(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    auto pop = random_population(rng, 30 + trial);
    const double a = w(rng), b = w(rng) * (1 - a);
    ScoringWeights weights{{a, b, 1 - a - b}, {w(rng), 0}};
    weights.serenity.biodiversity = 1 - weights.serenity.canopy;
    validate(weights);
    const auto base = score_segments(pop, weights);
    for (const auto& s : base) {
      CHECK(s.seq >= 0);
      CHECK(s.seq <= 1);
      CHECK(s.serenity >= 0);
      CHECK(s.serenity <= 1);
    }

    auto scaled = pop;
    const double k = 0.01 + 100 * w(rng);
    for (auto& s : scaled) {
      s.canopy_area_m2 *= k;
      s.co2_kg *= k;
      s.species_count *= k;
    }
    const auto sc = score_segments(scaled, weights);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(sc[i].seq == base[i].seq);
      CHECK(sc[i].serenity == base[i].serenity);
    }

    auto bumped = pop;
    const std::size_t i = static_cast<std::size_t>(trial) % pop.size();
    bumped[i].canopy_area_m2 += 50 * w(rng);
    const auto bb = score_segments(bumped, weights);
    CHECK(bb[i].seq >= base[i].seq);
    CHECK(bb[i].serenity >= base[i].serenity);
  }
}

TEST_CASE("weights validation and loading") {
  CHECK_NOTHROW(validate(ScoringWeights{}));
  CHECK_THROWS_AS(validate(ScoringWeights{{0.5, 0.5, 0.5}, {}}), Error);
  CHECK_THROWS_AS(validate(ScoringWeights{{1.2, -0.2, 0}, {}}), Error);
  CHECK_THROWS_AS(validate(ScoringWeights{{}, {0.6, 0.3}}), Error);

  testing::TempDir dir;
  testing::write_file(dir / "w.json",
                      R"({"seq":{"canopy":0.2,"co2":0.3,"biodiversity":0.5},"serenity":{"canopy":1,"biodiversity":0}})");
  const auto w = load_weights(dir / "w.json");
  CHECK(w.seq.biodiversity == 0.5);
  CHECK(w.serenity.canopy == 1);
  testing::write_file(dir / "bad.json", R"({"seq":{"canopy":0.9,"co2":0.3,"biodiversity":0.5}})");
  try {
    load_weights(dir / "bad.json");
    FAIL("expected InvalidWeights");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidWeights);
  }
}
