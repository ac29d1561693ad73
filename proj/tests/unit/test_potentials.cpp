#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "divcap/potentials.hpp"
#include "divcap/weight_analysis.hpp"

using namespace divcap;
using Catch::Approx;

namespace {

DiscreteMeasure atoms(int n, int count) {
  std::vector<Atom> a;
  for (int i = 0; i < count; ++i) {
    Point x(n);
    for (int d = 0; d < n; ++d) x[d] = 0.3 * std::sin(1.7 * i + d) * (count > 1 ? 1.0 : 0.0);
    a.push_back({x, 1.0 / count + 0.01 * i});
  }
  return DiscreteMeasure(std::move(a));
}

}  // namespace

TEST_CASE("Newton kernel basics") {
  CHECK(newton_constant(2) == Approx(1.0 / (2.0 * std::numbers::pi)));
  CHECK(newton_constant(3) == Approx(1.0 / (4.0 * std::numbers::pi)));
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 2.0}});
  const Point v = div_field_eval(mu, Point{0.5, 0.0});
  CHECK(v[0] == Approx(2.0 / (2.0 * std::numbers::pi * 0.5)));
  CHECK(v[1] == Approx(0.0).margin(1e-15));
  CHECK(riesz_potential(mu, Point{0.0, 0.25}) == Approx(8.0));
  CHECK(riesz_potential(mu, Point{0.0, 0.25}, 0.2) == 0.0);
  CHECK_THROWS(div_field_eval(mu, Point{0.0, 0.0}));
}

TEST_CASE("divergence identity holds for the test-function library") {
  for (int n : {2, 3}) {
    for (int count : {1, 2, 16}) {
      const auto mu = atoms(n, count);
      const auto lib = test_function_library(Point(n), 1.0);
      ShellConfig cfg;
      cfg.q.rel_tol = 1e-3;
      for (const auto& phi : lib) {
        const auto r = verify_divergence(mu, phi, cfg);
        INFO("n=" << n << " atoms=" << count << " " << phi.describe());
        CHECK(r.residual <= 0.01);
      }
    }
  }
}

TEST_CASE("single-atom Riesz energy: finite below p = 2, diverging above") {
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 1.0}});
  for (double p : {1.2, 1.5, 1.9}) {
    const auto e = riesz_energy(mu, Weight::constant(2), p, 1.0);
    CHECK_FALSE(e.diverging);
    // int_{|x| < 3} |x|^{-p} dx
    CHECK(e.value == Approx(2.0 * std::numbers::pi * std::pow(3.0, 2.0 - p) / (2.0 - p)).epsilon(1e-3));
  }
  for (double p : {2.1, 3.0}) CHECK(riesz_energy(mu, Weight::constant(2), p, 1.0).diverging);
  CHECK_THROWS_AS(riesz_energy(mu, Weight::constant(2), 1.0, 1.0), DomainError);
}

TEST_CASE("weighted sup norm of the Newton field") {
  const DiscreteMeasure mu({{Point{0.0, 0.0}, 1.0}});
  const auto v = VectorFieldSpec::riesz_of_measure(mu, 2);
  const Box box = Box::cube(2, -1.0, 1.0);
  const auto bounded = weighted_norm(v, Weight::radial_power(-1.0, Point{0.0, 0.0}), INFINITY, box);
  CHECK_FALSE(bounded.diverging);
  CHECK(bounded.value == Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-6));
  CHECK(weighted_norm(v, Weight::constant(2), INFINITY, box).diverging);
}

TEST_CASE("weighted L^p norm of a sampled constant field") {
  const Box box = Box::cube(2, 0.0, 2.0);
  GridField ex(box, 8), ey(box, 8);
  for (auto& x : ex.values()) x = 3.0;
  const auto v = VectorFieldSpec::grid_sampled({ex, ey});
  // (int_box 9 / 1)^{1/2} = 6
  CHECK(weighted_norm(v, Weight::constant(2), 2.0, box).value == Approx(6.0).epsilon(1e-6));
}

TEST_CASE("witness cutoff of a single ball") {
  const Ball b(Point{0.0, 0.0}, 0.5);
  Cover c;
  c.balls = {b};
  CHECK(witness_value(c, Point{0.1, 0.0}) == 1.0);
  CHECK(witness_value(c, Point{0.75, 0.0}) == Approx(0.5));
  CHECK(witness_value(c, Point{1.2, 0.0}) == 0.0);
  const auto wc = build_witness(c, Weight::constant(2), QuadratureConfig{});
  // |grad chi| = 1/r on the annulus r < |x| < 2r
  CHECK(wc.gradient_norm == Approx(3.0 * std::numbers::pi * 0.5));
  CHECK(wc.h_sum == Approx(std::numbers::pi * 0.5));
  CHECK(wc.local_doubling == Approx(4.0));
  CHECK(wc.gradient_norm <= 1.05 * 4.0 * wc.h_sum);
}

TEST_CASE("overlapping balls use the max combination") {
  Cover c;
  c.balls = {Ball(Point{0.0, 0.0}, 0.5), Ball(Point{0.6, 0.0}, 0.5)};
  const auto wc = build_witness(c, Weight::constant(2), QuadratureConfig{});
  CHECK(wc.gradient_norm < wc.sum_bound);
  CHECK(wc.gradient_norm <= 1.05 * 4.0 * wc.h_sum);
}

TEST_CASE("canonical Cantor witness obeys the doubling bound") {
  const Weight w = Weight::cantor_distance(2, 0.5, 0.25);
  const QuadratureConfig q{.rel_tol = 1e-3};
  const double cd = estimate_doubling(w, Box::cube(2, 0.0, 1.0), 16, q).C_D;
  for (int k : {0, 2, 4}) {
    const auto wc = build_canonical_witness(w, CantorSpec::from_dimension(2, 0.5, k), q);
    CHECK(wc.gradient_norm <= 1.05 * std::max(cd, wc.local_doubling) * wc.h_sum);
  }
}
