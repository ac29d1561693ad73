#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "divcap/cantor_integral.hpp"
#include "divcap/fractal.hpp"
#include "divcap/quadrature.hpp"

using namespace divcap;
using Catch::Approx;

TEST_CASE("radial closed form matches cubature") {
  QuadratureConfig q;
  q.rel_tol = 1e-7;
  for (int n : {2, 3}) {
    for (double eta : {-1.0, -0.5, 0.0, 1.0}) {
      for (double r : {0.3, 1.0, 2.5}) {
        const Point c = n == 2 ? Point{0.1, -0.2} : Point{0.1, -0.2, 0.3};
        const Weight w = Weight::radial_power(eta, c);
        const Ball b(c, r);
        const double exact = radial_ball_integral(n, {1.0, eta}, r);
        const auto closed = integrate_ball(w, b, q);
        CHECK(closed.closed_form);
        CHECK(closed.value == Approx(exact).epsilon(1e-12));
        const auto cub = integrate_ball_fn(b, [&](const Point& x) { return w.eval_unchecked(x); }, q);
        CHECK(cub.value == Approx(exact).epsilon(1e-4));
        CHECK(h_value(w, b, q).value == Approx(exact / r).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("closed form constants") {
  CHECK(radial_ball_integral(2, {1.0, 0.0}, 1.0) == Approx(std::numbers::pi));
  CHECK(radial_ball_integral(3, {2.0, 0.0}, 1.0) == Approx(8.0 * std::numbers::pi / 3.0));
  CHECK(radial_ball_integral(2, {1.0, -1.0}, 2.0) == Approx(4.0 * std::numbers::pi));
}

TEST_CASE("off-center balls of a radial weight") {
  // |x|^{-1} over B((2, 0), 1) in polar coordinates about the origin
  const Weight w = Weight::radial_power(-1.0, Point{0.0, 0.0});
  QuadratureConfig q;
  q.rel_tol = 1e-8;
  const double v = integrate_ball(w, Ball(Point{2.0, 0.0}, 1.0), q).value;
  const auto ref = integrate_annulus(Point{0.0, 0.0}, 1.0, 3.0,
                                     [](const Point& x) {
                                       return distance(x, Point{2.0, 0.0}) < 1.0 ? 1.0 / norm(x) : 0.0;
                                     },
                                     QuadratureConfig{.rel_tol = 1e-6, .max_evals = 20'000'000});
  CHECK(v == Approx(ref.value).epsilon(1e-3));
}

TEST_CASE("box and box-ball cubature") {
  QuadratureConfig q;
  q.rel_tol = 1e-9;
  const Box box(Point{0.0, 0.0, 0.0}, Point{1.0, 2.0, 3.0});
  const auto r = integrate_box_fn(box, [](const Point& x) { return x[0] * x[1] * x[2]; }, q);
  CHECK(r.value == Approx(0.5 * 2.0 * 4.5));
  // quarter disc
  const auto qd = integrate_box_ball_fn(Box::cube(2, 0.0, 5.0), Ball(Point{0.0, 0.0}, 1.0),
                                        [](const Point&) { return 1.0; }, q);
  CHECK(qd.value == Approx(std::numbers::pi / 4.0));
  // annulus area
  const auto an = integrate_annulus(Point{0.0, 0.0}, 1.0, 2.0, [](const Point&) { return 1.0; }, q);
  CHECK(an.value == Approx(3.0 * std::numbers::pi));
}

TEST_CASE("invalid configurations") {
  QuadratureConfig q;
  q.rel_tol = 0.0;
  CHECK_THROWS_AS(q.validate(), DomainError);
  q = QuadratureConfig{};
  q.max_depth = -1;
  CHECK_THROWS_AS(q.validate(), DomainError);
  CHECK_THROWS_AS(Weight::radial_power(-2.5, Point{0.0, 0.0}), DomainError);
}

TEST_CASE("self-similar Cantor integral agrees with brute-force cubature") {
  const double s = 0.5, gamma = 0.25;
  const Weight w = Weight::cantor_distance(2, s, gamma);
  const auto form = cantor_form(w);
  REQUIRE(form);
  CHECK(cantor_self_similar(2, form->lambda));
  CHECK_FALSE(cantor_self_similar(2, 0.45));
  QuadratureConfig q;
  q.rel_tol = 1e-4;
  for (const Ball& b : {Ball(Point{0.5, 0.5}, 0.8), Ball(Point{0.03, 0.02}, 0.05), Ball(Point{1.1, 0.9}, 0.4)}) {
    const auto fast = cantor_ball_integral(*form, b, q);
    const auto brute = integrate_ball_fn(b, [&](const Point& x) { return w.eval_unchecked(x); },
                                         QuadratureConfig{.rel_tol = 1e-5, .max_evals = 20'000'000});
    CHECK(fast.value == Approx(brute.value).epsilon(2e-3));
    CHECK(fast.min_sample <= fast.max_sample);
  }
  CHECK_FALSE(cantor_form(Weight::radial_power(-0.5, Point{0.0, 0.0})));
  CHECK_FALSE(cantor_form(Weight::dist_power(CantorReference{2, 0.0625, 2}, 0.5)));
}

TEST_CASE("Cantor integral scales self-similarly about a point of the set") {
  const Weight w = Weight::cantor_distance(2, 1.0, 0.5);
  const auto form = *cantor_form(w);
  const QuadratureConfig q{.rel_tol = 1e-3};
  // x -> lambda x maps E near the origin onto itself, so dist scales by lambda
  const double l = form.lambda;
  const double big = cantor_ball_integral(form, Ball(Point{0.0, 0.0}, 0.2), q).value;
  const double small = cantor_ball_integral(form, Ball(Point{0.0, 0.0}, 0.2 * l), q).value;
  CHECK(small == Approx(std::pow(l, 2.0 + form.alpha) * big).epsilon(5e-3));
}
