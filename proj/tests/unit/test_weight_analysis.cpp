#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>

#include "divcap/weight_analysis.hpp"

using namespace divcap;
using Catch::Approx;

namespace {
Point origin(int n) { return Point(n); }
Point offset(int n) {
  Point x(n);
  for (int i = 0; i < n; ++i) x[i] = 0.3 / (i + 1);
  return x;
}
}  // namespace

TEST_CASE("constant weight: C_D = 2^n and A1 = 1") {
  for (int n : {2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Weight w = Weight::constant(n);
    const Box region = Box::cube(n, -1.0, 1.0);
    const auto cd = estimate_doubling(w, region, 32, QuadratureConfig{});
    CHECK(cd.C_D == Approx(std::ldexp(1.0, n)).epsilon(0.01));
    CHECK(cd.s_D == Approx(n).epsilon(0.01));
    const auto a1 = estimate_Ap(w, 1.0, region, 32, QuadratureConfig{});
    CHECK_FALSE(a1.infinite);
    CHECK(a1.constant == Approx(1.0).epsilon(0.01));
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 10.0);
  }
}

TEST_CASE("doubling ratio of centered balls is 2^{n+eta}") {
  for (int n : {2, 3}) {
    for (double eta : {-1.0, -0.5, 0.0, 1.0}) {
      const Weight w = Weight::radial_power(eta, origin(n));
      CHECK(doubling_ratio(w, Ball(origin(n), 0.7), QuadratureConfig{}) == Approx(std::pow(2.0, n + eta)));
    }
  }
}

TEST_CASE("sampled doubling constant is a lower bound inside the exact range") {
  const Weight w = Weight::radial_power(1.0, origin(2));
  const auto cd = estimate_doubling(w, Box::cube(2, -1.0, 1.0), 32, QuadratureConfig{});
  CHECK(cd.C_D >= 4.0 * 0.99);
  CHECK(cd.C_D <= 8.0 * 1.01);
  const auto serial = estimate_doubling_serial(w, Box::cube(2, -1.0, 1.0), 32, QuadratureConfig{});
  CHECK(serial.C_D == cd.C_D);
}

TEST_CASE("A_p products of power weights") {
  // centered ball: avg |x|^eta = n/(n+eta) r^eta, min on the sphere r^eta
  const Weight w = Weight::radial_power(-1.0, origin(2));
  CHECK(ap_product(w, 1.0, Ball(origin(2), 1.0), QuadratureConfig{}) == Approx(2.0).epsilon(0.01));
  // A_2 for |x|^eta, centered: (n/(n+eta)) (n/(n-eta))
  const Weight v = Weight::radial_power(0.5, origin(2));
  CHECK(ap_product(v, 2.0, Ball(origin(2), 1.0), QuadratureConfig{}) == Approx((2.0 / 2.5) * (2.0 / 1.5)).epsilon(1e-3));
  // Jensen: every A_p product is >= 1
  const auto est = estimate_Ap(v, 2.0, Box::cube(2, -1.0, 1.0), 16, QuadratureConfig{});
  CHECK(est.constant >= 1.0);
}

TEST_CASE("A1 of a positive power blows up") {
  const Weight w = Weight::radial_power(1.0, origin(2));
  const auto est = estimate_Ap(w, 1.0, Box::cube(2, -1.0, 1.0), 16, QuadratureConfig{});
  CHECK(est.infinite);
}

TEST_CASE("growth slopes are n + eta - 1") {
  const std::vector<double> radii{1.0, 3.0, 10.0, 30.0, 100.0};
  for (int n : {2, 3}) {
    for (double eta : {-1.0, -0.5, 0.0, 1.0}) {
      const Weight w = Weight::radial_power(eta, origin(n));
      const auto g = check_growth(w, offset(n), radii, QuadratureConfig{});
      CHECK(g.slope == Approx(n + eta - 1.0).margin(0.05));
    }
    // boundary of the admissible range: eta = 1 - n gives slope 0
    const auto b = check_growth(Weight::radial_power(1.0 - n, origin(n)), offset(n), radii, QuadratureConfig{});
    CHECK(b.slope == Approx(0.0).margin(0.05));
    CHECK(b.trend == GrowthTrend::bounded);
  }
  const auto d = check_growth(Weight::constant(2), origin(2), radii, QuadratureConfig{});
  CHECK(d.trend == GrowthTrend::diverging);
}

TEST_CASE("helpers") {
  const auto r = log_spaced(1.0, 100.0, 3);
  REQUIRE(r.size() == 3);
  CHECK(r[1] == Approx(10.0));
  CHECK(fit_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == Approx(2.0));
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(3, 3) == Approx(1.0 / 9.0));
  const auto balls = halton_balls(Box::cube(2, 0.0, 1.0), 10);
  CHECK(balls.size() == 10);
  for (const auto& b : balls) CHECK(Box::cube(2, 0.0, 1.0).contains(b.center));
}
