#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "divcap/content.hpp"
#include "divcap/frostman.hpp"

using namespace divcap;
using Catch::Approx;

TEST_CASE("dyadic radius ladder") {
  const auto r = dyadic_radii(0.25, 1.0);
  REQUIRE(r.size() == 3);
  CHECK(r.back() == 1.0);
  CHECK(dyadic_radii(0.3, 1.0).back() == Approx(1.2));
  CHECK_THROWS_AS(dyadic_radii(0.0, 1.0), DomainError);
}

TEST_CASE("ball sample is deterministic and centered on atoms") {
  const auto mu = segment_measure(Point{0.0, 0.0}, Point{1.0, 0.0}, 8);
  BallSampleOptions opt;
  opt.off_center = 3;
  const auto a = default_ball_sample(mu, opt);
  const auto b = default_ball_sample(mu, opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].center == b[i].center);
  const std::size_t ladder = dyadic_radii(mu.min_spacing() * (1.0 - 1e-9), mu.diameter()).size();
  CHECK(a.size() == mu.size() * (ladder + 3));
}

TEST_CASE("segment arc length: Frostman lower bound near pi/2") {
  const auto mu = segment_measure(Point{0.0, 0.0}, Point{1.0, 0.0}, 64);
  auto balls = default_ball_sample(mu);
  for (int N : {1, 2, 4, 8, 16, 32, 64}) {
    const auto c = aligned_segment_cover(Point{0.0, 0.0}, Point{1.0, 0.0}, N);
    balls.insert(balls.end(), c.balls.begin(), c.balls.end());
  }
  const auto r = frostman_constant(mu, Weight::constant(2), balls, QuadratureConfig{});
  CHECK(r.total == Approx(1.0));
  // mu(B) <= 2r = (2/pi) h(B) for centered balls; the bound stays below the cover sum pi/2
  CHECK(r.lower_bound >= std::numbers::pi / 2.0 * 0.95);
  CHECK(r.lower_bound <= std::numbers::pi / 2.0 * 1.01);
  const auto s = frostman_constant_serial(mu, Weight::constant(2), balls, QuadratureConfig{});
  CHECK(s.C_hat == r.C_hat);
}

TEST_CASE("a point mass has no Frostman bound as r -> 0") {
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 1.0}});
  double previous = INFINITY;
  for (double r_min : {0.5, 0.05, 0.005}) {
    BallSampleOptions opt;
    opt.r_min = r_min;
    opt.r_max = 1.0;
    const auto rep = frostman_constant(mu, Weight::constant(2), default_ball_sample(mu, opt), QuadratureConfig{});
    CHECK(rep.lower_bound == Approx(std::numbers::pi * r_min).epsilon(1e-6));
    CHECK(rep.lower_bound < previous);
    previous = rep.lower_bound;
  }
}

TEST_CASE("Frostman ratio is at least mu(B)/h(B) on every sampled ball") {
  const auto mu = natural_measure(CantorSpec::from_dimension(2, 1.0, 2));
  const Weight w = Weight::cantor_distance(2, 1.0, 0.25);
  const auto balls = default_ball_sample(mu);
  const QuadratureConfig q{.rel_tol = 1e-3};
  const auto rep = frostman_constant(mu, w, balls, q);
  for (std::size_t i = 0; i < balls.size(); i += 17) {
    const double m = measure_of_ball(mu, balls[i]);
    if (m > 0.0) CHECK(m / h_value(w, balls[i], q).value <= rep.C_hat * (1.0 + 1e-12));
  }
  CHECK(rep.lower_bound == Approx(rep.total / rep.C_hat));
}

TEST_CASE("dual check: hat function against a unit atom") {
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 1.0}});
  const auto phi = TestFunction::radial_hat(Point{0.0, 0.0}, 2.0);
  const auto d = prop_dual_check(mu, Weight::constant(2), phi, QuadratureConfig{.rel_tol = 1e-8});
  CHECK(d.lhs == Approx(1.0));
  CHECK(d.rhs == Approx(2.0 * std::numbers::pi));
  CHECK(d.ratio == Approx(1.0 / (2.0 * std::numbers::pi)));
}
