#include <catch2/catch_amalgamated.hpp>

#include "divcap/measure.hpp"

using namespace divcap;
using Catch::Approx;

TEST_CASE("segment measure is uniform with mass equal to length") {
  const auto mu = segment_measure(Point{0.0, 0.0}, Point{3.0, 4.0}, 10);
  CHECK(mu.size() == 10);
  CHECK(mu.total() == Approx(5.0));
  CHECK(mu.min_spacing() == Approx(0.5));
  CHECK(mu.diameter() == Approx(4.5));
  CHECK(mu.atoms().front().x[0] == Approx(0.15));
  CHECK(mu.atoms().front().x[1] == Approx(0.2));
}

TEST_CASE("measure of open balls") {
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 1.0}, {Point{1.0, 0.0}, 2.0}});
  CHECK(measure_of_ball(mu, Ball(Point{0.0, 0.0}, 0.5)) == 1.0);
  CHECK(measure_of_ball(mu, Ball(Point{0.0, 0.0}, 1.0)) == 1.0);
  CHECK(measure_of_ball(mu, Ball(Point{0.0, 0.0}, 1.0001)) == 3.0);
  CHECK((mu + mu).total() == 6.0);
  CHECK(mu.scaled(0.5).total() == 1.5);
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(DiscreteMeasure({{Point{0.0}, -1.0}}), DomainError);
  CHECK_THROWS_AS(DiscreteMeasure({{Point{0.0}, 1.0}, {Point{0.0, 1.0}, 1.0}}), DomainError);
  CHECK_THROWS_AS(segment_measure(Point{0.0}, Point{1.0}, 0), DomainError);
}
