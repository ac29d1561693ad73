#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "divcap/geometry.hpp"

using namespace divcap;
using Catch::Approx;

TEST_CASE("unit ball volumes match the closed forms") {
  const double pi = std::numbers::pi;
  CHECK(unit_ball_volume(1) == Approx(2.0));
  CHECK(unit_ball_volume(2) == Approx(pi));
  CHECK(unit_ball_volume(3) == Approx(4.0 * pi / 3.0));
  CHECK(unit_ball_volume(4) == Approx(pi * pi / 2.0));
  for (int n = 1; n <= 4; ++n) CHECK(unit_sphere_area(n) == Approx(n * unit_ball_volume(n)));
  CHECK(unit_sphere_area(2) == Approx(2.0 * pi));
}

TEST_CASE("point arithmetic and metrics") {
  const Point a{1.0, 2.0}, b{4.0, 6.0};
  CHECK(distance(a, b) == Approx(5.0));
  CHECK(norm2(b - a) == Approx(25.0));
  CHECK(dot(a, b) == Approx(16.0));
  CHECK((a + b) == Point{5.0, 8.0});
  CHECK((2.0 * a) == Point{2.0, 4.0});
  CHECK(Point::from({1.0, 2.0}) == a);
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(Point(0), DomainError);
  CHECK_THROWS_AS(Point(5), DomainError);
  CHECK_THROWS_AS(require_same_dim(2, 3, "test"), DomainError);
  CHECK_THROWS_AS(Ball(Point{0.0, 0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(Box(Point{0.0, 0.0}, Point{1.0, 0.0}), DomainError);
}

TEST_CASE("balls are open, boxes closed") {
  const Ball b(Point{0.0, 0.0}, 1.0);
  CHECK(b.contains(Point{0.5, 0.5}));
  CHECK_FALSE(b.contains(Point{1.0, 0.0}));
  const Box x = Box::cube(2, 0.0, 1.0);
  CHECK(x.contains(Point{1.0, 1.0}));
  CHECK_FALSE(x.contains(Point{1.0001, 0.5}));
  CHECK(x.center() == Point{0.5, 0.5});
  CHECK(x.diameter() == Approx(std::sqrt(2.0)));
}

TEST_CASE("distance to a box") {
  const Point lo{0.0, 0.0};
  CHECK(distance_to_box(Point{0.5, 0.5}, lo, 1.0) == 0.0);
  CHECK(distance_to_box(Point{2.0, 0.5}, lo, 1.0) == Approx(1.0));
  CHECK(distance_to_box(Point{-3.0, -4.0}, lo, 1.0) == Approx(5.0));
  CHECK(distance_to_box(Point{4.0, 5.0}, lo, 1.0) == Approx(5.0));
}
