#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "divcap/certifier.hpp"

using namespace divcap;
using Catch::Approx;

namespace {

double evidence(const Verdict& v, const std::string& name) {
  for (const auto& e : v.evidence) {
    if (e.name == name) return e.value;
  }
  FAIL("missing evidence " << name);
  return 0.0;
}

bool has_table(const Verdict& v, const std::string& name) {
  for (const auto& t : v.tables) {
    if (t.name == name) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("conjugate exponents") {
  CHECK(conjugate_exponent(2.0) == 2.0);
  CHECK(conjugate_exponent(3.0) == 1.5);
  CHECK(conjugate_exponent(INFINITY) == 1.0);
  CHECK_THROWS_AS(conjugate_exponent(1.0), DomainError);
}

TEST_CASE("a point is removable for w = 1, p = inf") {
  CaseSpec c;
  c.set = PointSet{Point{0.0, 0.0}};
  const Verdict v = certify(c);
  CHECK(v.outcome == Outcome::removable);
  CHECK(v.branch == Branch::hausdorff);
  CHECK(evidence(v, "content_upper_first") == Approx(std::numbers::pi));
  CHECK(evidence(v, "content_upper_final") <= 1e-3 * std::numbers::pi);
  CHECK(evidence(v, "content_exponent") == Approx(1.0));
  CHECK(has_table(v, "content_curve"));
  CHECK(has_table(v, "growth"));
  CHECK(v.statement.find("certified at budget") != std::string::npos);
  CHECK_FALSE(v.failure);
}

TEST_CASE("a segment is non-removable for w = 1, p = inf") {
  CaseSpec c;
  c.set = SegmentSet{Point{0.0, 0.0}, Point{1.0, 0.0}};
  const Verdict v = certify(c);
  CHECK(v.outcome == Outcome::non_removable);
  CHECK(evidence(v, "content_upper_final") <= std::numbers::pi / 2.0 * 1.01);
  CHECK(evidence(v, "frostman_lower") >= std::numbers::pi / 2.0 * 0.95);
}

TEST_CASE("the Cantor example certifies removable below the threshold") {
  CaseSpec c;
  c.set = CantorSet{CantorSpec::from_dimension(2, 0.5, 5)};
  c.weight = Weight::cantor_distance(2, 0.5, 0.25);
  const Verdict v = certify(c);
  CHECK(v.outcome == Outcome::removable);
  CHECK(evidence(v, "content_exponent") == Approx(0.5).margin(0.1));
}

TEST_CASE("capacity branch: point null, segment positive") {
  CaseSpec c;
  c.p = 2.0;
  c.set = PointSet{Point{0.0, 0.0}};
  const Verdict point = certify(c);
  CHECK(point.branch == Branch::capacity);
  CHECK(point.outcome == Outcome::removable);
  c.set = SegmentSet{Point{-0.5, 0.0}, Point{0.5, 0.0}};
  const Verdict seg = certify(c);
  CHECK(seg.outcome == Outcome::non_removable);
  CHECK(has_table(seg, "capacity_ladder"));
}

TEST_CASE("sub-computation failures give inconclusive verdicts") {
  CaseSpec c;
  c.set = CantorSet{CantorSpec::from_dimension(2, 0.5, 5)};
  c.weight = Weight::radial_power(-0.5, Point{0.3, 0.3});
  c.budget.enumeration_cap = 8;
  const Verdict v = certify(c);
  CHECK(v.outcome == Outcome::inconclusive);
  REQUIRE(v.failure);
  CHECK_FALSE(v.failure->empty());
}

TEST_CASE("case validation") {
  CaseSpec c;
  c.p = 1.0;
  CHECK_THROWS_AS(certify(c), DomainError);
  c.p = INFINITY;
  c.set = BallSet{Ball(Point{0.0, 0.0}, 0.5)};
  CHECK_THROWS_AS(certify(c), DomainError);
  c.set = PointSet{Point{0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(certify(c), DomainError);
  c.set = PointSet{Point{0.0, 0.0}};
  c.budget.segment_covers = {4, 2};
  CHECK_THROWS_AS(certify(c), DomainError);
  c.budget = Budget{};
  c.margins.decay_factor = 2.0;
  CHECK_THROWS_AS(certify(c), DomainError);
}

TEST_CASE("more refinement never flips a definite verdict") {
  for (int levels : {4, 7}) {
    CaseSpec c;
    c.set = PointSet{Point{0.0, 0.0}};
    c.budget.point_levels = levels;
    CHECK(certify(c).outcome == Outcome::inconclusive);  // decay below the margin
  }
  for (int levels : {10, 12, 16}) {
    CaseSpec c;
    c.set = PointSet{Point{0.0, 0.0}};
    c.budget.point_levels = levels;
    CHECK(certify(c).outcome == Outcome::removable);
  }
  for (auto covers : {std::vector<int>{1, 2, 4}, std::vector<int>{1, 2, 4, 8, 16, 32, 64, 128}}) {
    CaseSpec c;
    c.set = SegmentSet{Point{0.0, 0.0}, Point{1.0, 0.0}};
    c.budget.segment_covers = covers;
    CHECK(certify(c).outcome == Outcome::non_removable);
  }
}

TEST_CASE("one-cell sweep") {
  SweepSettings s;
  s.gammas = {0.25};
  s.dims = {0.5};
  const auto rows = sweep_cantor(s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].verdict == "removable");
  CHECK(rows[0].predicted == Approx(0.5));
  CHECK(rows[0].threshold == Approx(2.0 / 3.0));
  CHECK(rows[0].sign_agrees);
  CHECK(rows[0].witness_ok);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.rfind("gamma,s,predicted_exponent", 0) == 0);
}

TEST_CASE("failed sweep cells are recorded and the sweep continues") {
  SweepSettings s;
  s.gammas = {0.0};
  s.dims = {0.5, 2.5};
  const auto rows = sweep_cantor(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].verdict == "removable");
  CHECK(rows[1].verdict == "error");
  CHECK_FALSE(rows[1].error.empty());
}
