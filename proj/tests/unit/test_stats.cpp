#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support/oracles.hpp"
#include "verdant/error.hpp"
#include "verdant/geometry.hpp"
#include "verdant/stats.hpp"

using namespace verdant;

TEST_CASE("percentile matches fixture and oracle") {
  const std::vector<double> s{30, 32, 34, 36, 38, 40, 42, 44, 46, 48};
  CHECK(stats::percentile(s, 90) == doctest::Approx(46.2).epsilon(1e-15));
  CHECK(stats::percentile(s, 10) == doctest::Approx(31.8).epsilon(1e-15));
  CHECK(stats::percentile(s, 0) == 30);
  CHECK(stats::percentile(s, 100) == 48);
  CHECK(stats::percentile(std::vector<double>{5.0}, 37) == 5.0);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-20, 80);
  std::uniform_int_distribution<int> n(1, 300);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(n(rng)));
    for (auto& x : v) x = u(rng);
    for (double p : {0.0, 10.0, 25.0, 50.0, 75.0, 90.0, 100.0, 33.3})
      CHECK(std::abs(stats::percentile(v, p) - testing::oracle_percentile(v, p)) <= 1e-9);
  }
}

TEST_CASE("quantile transform is mid-rank") {
  const std::vector<double> v{10, 20, 30, 40};
  const auto q = stats::quantile_transform(v);
  CHECK(q[2] == 0.625);
  CHECK(q[3] == 3.5 / 4);

  const auto eq = stats::quantile_transform(std::vector<double>{7, 7, 7});
  for (double x : eq) CHECK(x == 0.5);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(0, 20);
  std::vector<double> pop(200);
  for (auto& x : pop) x = small(rng);
  const auto got = stats::quantile_transform(pop);
  for (std::size_t i = 0; i < pop.size(); ++i) CHECK(got[i] == testing::oracle_midrank(pop, pop[i]));

  CHECK_THROWS_AS(stats::quantile_transform(std::vector<double>{}), Error);
}

TEST_CASE("running mean is exact for constants") {
  stats::RunningMean m;
  for (int i = 0; i < 1000; ++i) m.add(9.66);
  CHECK(m.value() == 9.66);
  CHECK(m.count() == 1000);
}

TEST_CASE("geometry primitives") {
  const Ring sq{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {0, 0}};
  CHECK(open_ring(sq).size() == 4);
  CHECK(signed_area(sq) == 100);
  CHECK(locate({5, 5}, sq) == Location::Inside);
  CHECK(locate({10, 5}, sq) == Location::Boundary);
  CHECK(locate({0, 0}, sq) == Location::Boundary);
  CHECK(locate({11, 5}, sq) == Location::Outside);
  CHECK(point_in_polygon({10, 5}, sq));
  CHECK(is_simple(sq));
  CHECK_FALSE(is_simple(Ring{{0, 0}, {10, 10}, {10, 0}, {0, 10}}));

  const Polyline l{{0, 0}, {3, 4}, {3, 10}};
  CHECK(polyline_length(l) == 11);
  CHECK(polyline_midpoint(l).x == doctest::Approx(3.0));
  CHECK(polyline_midpoint(l).y == doctest::Approx(4.5));
  CHECK(point_polyline_distance({6, 7}, l) == doctest::Approx(3.0));
  CHECK(point_segment_distance({-3, -4}, {0, 0}, {3, 4}) == doctest::Approx(5.0));
}
