#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "divcap/fractal.hpp"

using namespace divcap;
using Catch::Approx;

TEST_CASE("Cantor spec basics") {
  const auto spec = CantorSpec::from_dimension(2, 1.0, 3);
  CHECK(spec.lambda() == Approx(0.25));
  CHECK(similarity_dimension(spec) == Approx(1.0));
  CHECK(spec.side(2) == Approx(1.0 / 16.0));
  CHECK(spec.cube_count(3) == 64.0);
  CHECK(spec.gap(1) == Approx(0.5));
  CHECK_THROWS_AS(CantorSpec(2, 0.5, 1), DomainError);
  CHECK_THROWS_AS(CantorSpec(2, 0.25, -1), DomainError);
  CHECK_THROWS_AS(CantorSpec::from_dimension(2, 2.0, 1), DomainError);
}

TEST_CASE("generated cubes are ordered, disjoint, and inside their parents") {
  const CantorSpec spec(2, 0.3, 2);
  const auto cubes = generate_cubes(spec);
  REQUIRE(cubes.size() == 16);
  CHECK(cubes.front().anchor == Point{0.0, 0.0});
  CHECK(cubes[1].anchor[0] == 0.0);
  CHECK(cubes[1].anchor[1] == Approx(0.7 * 0.3));
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    for (std::size_t j = i + 1; j < cubes.size(); ++j) {
      double sep = 0.0;
      for (int d = 0; d < 2; ++d) {
        sep = std::max(sep, std::abs(cubes[i].anchor[d] - cubes[j].anchor[d]) - cubes[i].side);
      }
      CHECK(sep >= spec.gap(2) - 1e-12);
    }
  }
  CHECK_THROWS(generate_cubes(CantorSpec(2, 0.25, 6), 1000));
}

TEST_CASE("dist_to_set agrees with enumeration") {
  const CantorSpec spec(2, 0.2, 3);
  const auto cubes = generate_cubes(spec);
  for (int i = 0; i < 200; ++i) {
    const Point x{-0.3 + 1.6 * std::fmod(i * 0.618034, 1.0), -0.3 + 1.6 * std::fmod(i * 0.414214, 1.0)};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cubes) best = std::min(best, distance_to_box(x, c.anchor, c.side));
    CHECK(dist_to_set(spec, x) == Approx(best).margin(1e-14));
  }
}

TEST_CASE("dist_to_set worked examples") {
  // generation-2 middle-thirds intervals: [0,1/9], [2/9,1/3], [2/3,7/9], [8/9,1]
  CHECK(dist_to_set(CantorSpec(1, 1.0 / 3.0, 2), Point{0.5}) == Approx(1.0 / 6.0));
  CHECK(dist_to_set(CantorSpec(1, 1.0 / 3.0, 2), Point{0.25}) == 0.0);
  CHECK(dist_to_set(CantorSpec(2, 0.25, 1), Point{0.5, 0.5}) == Approx(std::sqrt(2.0) * 0.25));
}

TEST_CASE("limit-set distance: corners are in E, gaps are not") {
  const double l = 0.25;
  CHECK(dist_to_limit_set(2, l, Point{0.0, 0.0}) == 0.0);
  CHECK(dist_to_limit_set(2, l, Point{1.0, 1.0}) == 0.0);
  CHECK(dist_to_limit_set(2, l, Point{0.25, 0.0}) == 0.0);
  // center of [0,1]^2: nearest points are the inner corners of the level-1 cubes
  CHECK(dist_to_limit_set(2, l, Point{0.5, 0.5}) == Approx(std::sqrt(2.0) * 0.25).epsilon(1e-9));
  CHECK(dist_to_limit_set(2, l, Point{-1.0, 0.0}) == Approx(1.0));
  // E lies inside every generation, so distances to E_k bound it from below
  const Point x{0.37, 0.61};
  for (int k = 0; k < 6; ++k) CHECK(dist_to_set(CantorSpec(2, l, k), x) <= dist_to_limit_set(2, l, x) + 1e-12);
}

TEST_CASE("natural measure is a probability measure on cube centers") {
  const auto spec = CantorSpec::from_dimension(2, 0.5, 3);
  const auto mu = natural_measure(spec);
  CHECK(mu.size() == 64);
  CHECK(mu.total() == Approx(1.0));
  CHECK(mu.atoms().front().m == Approx(1.0 / 64.0));
}
