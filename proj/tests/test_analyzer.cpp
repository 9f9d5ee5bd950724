#include "phaseforge/analyzer.hpp"

#include "phaseforge/errors.hpp"

#include "doctest.h"

using namespace phaseforge;

namespace {

GroupElement z(std::int64_t n) {
  GroupElement x;
  x.free.push_back(n);
  return x;
}

}  // namespace

TEST_CASE("detect: naturals_except has a finite (2, 2|W|) transition") {
  const auto report = detect_transition(make_naturals_except({3, 7}), {10, 20, 40}, 3);
  CHECK(report.r == 2);
  CHECK(report.finite);
  CHECK(report.s == 4);
  REQUIRE(report.transition_set.size() == 4);
  CHECK(report.transition_set[0] == z(-7));
  CHECK(report.transition_set[1] == z(-3));
  CHECK(report.transition_set[2] == z(3));
  CHECK(report.transition_set[3] == z(7));
  CHECK(report.evidence.size() == 3);
}

TEST_CASE("detect: one_union_multiples is window-growing at its last radius") {
  const auto report = detect_transition(make_one_union_multiples(4), {10, 20, 40}, 5);
  CHECK(report.r == 3);  // floor(4/2) + 1
  CHECK_FALSE(report.finite);
}

TEST_CASE("detect: coordinate axes transition set is the all-nonzero block") {
  const auto family = make_coordinate_axes(2);
  const auto report = detect_transition(family, {3, 5, 8}, 4);
  CHECK(report.r == 2);
  CHECK_FALSE(report.finite);
  const auto expected = evaluate_rule(SetRule::all_nonzero(), family.spec, ObservationWindow{8});
  CHECK(report.transition_set == expected);
}

TEST_CASE("detect: inconsistent window evidence raises ConsistencyViolation") {
  // windows 3 and 4 both see only {±2} at radius 2; window 10 also sees {±9}
  CHECK_THROWS_AS(detect_transition(make_naturals_except({2, 9}), {3, 4, 10}, 3), ConsistencyViolation);
}

TEST_CASE("detect: an empty radius below a populated one violates the growth shape") {
  // Every member of this family exceeds the window, so radius 1 is empty
  // inside it while radius 3 holds the recovered index 2.
  CHECK_THROWS_AS(detect_transition(make_nathanson(4, {1, 3}), {8, 10, 12}, 4), ConsistencyViolation);
}

TEST_CASE("detect: cap smaller than the longest window element is a domain error") {
  CHECK_THROWS_AS(detect_transition(make_naturals_except({2}), {5, 8, 11}, 1), DomainError);
}

TEST_CASE("detect: window preconditions") {
  CHECK_THROWS_AS(detect_transition(make_naturals_except({2}), {5, 8}, 3), DomainError);
  CHECK_THROWS_AS(detect_transition(make_naturals_except({2}), {8, 5, 11}, 3), DomainError);
}

TEST_CASE("verify: lemma2s transition set rule") {
  Expectation expect;
  expect.r = 2;
  expect.s = 5;
  expect.rule = SetRule::torsion_ball(3);
  const auto report = verify_construction(make_lemma2s(5), expect, {5, 7, 9}, 3);
  CHECK(report.pass);
}

TEST_CASE("verify: mismatch lists offending elements with lengths") {
  Expectation expect;
  expect.r = 2;
  expect.s = 2;
  expect.rule = SetRule::w_symmetric({3});
  const auto report = verify_construction(make_naturals_except({4}), expect, {8, 12, 16}, 3);
  CHECK_FALSE(report.pass);
  REQUIRE_FALSE(report.mismatches.empty());
  bool mentions_four = false;
  for (const auto& m : report.mismatches) {
    if (m.find("4") != std::string::npos) mentions_four = true;
  }
  CHECK(mentions_four);
}

TEST_CASE("verify: nathanson family matches its W rule") {
  Expectation expect;
  expect.r = 3;
  expect.s = 2;
  expect.rule = SetRule::w_symmetric({2});
  // windows chosen so each adds a generator (members begin 3, 4, 12, 15, ...)
  const auto report = verify_construction(make_nathanson(3, {2}), expect, {4, 12, 15}, 3);
  CHECK(report.pass);
}

TEST_CASE("verify is byte-identical on identical inputs") {
  Expectation expect;
  expect.r = 2;
  expect.s = 1;
  expect.rule = SetRule::torsion_ball(1);
  const auto a = verify_construction(make_lemma2s(1), expect, {3, 5, 7}, 3);
  const auto b = verify_construction(make_lemma2s(1), expect, {3, 5, 7}, 3);
  CHECK(verification_report_to_json(a).dump() == verification_report_to_json(b).dump());
  CHECK(transition_report_to_json(a.detected).dump() == transition_report_to_json(b.detected).dump());
}

TEST_CASE("counting function") {
  CHECK(counting_function(make_naturals_except({2}), 10) == 9);
  CHECK(counting_function(make_one_union_multiples(5), 20) == 5);
  CHECK(counting_function(make_nathanson(3, {2}), 16) == 4);
  CHECK(counting_function(make_coordinate_axes(1), 7) == 7);
  CHECK_THROWS_AS(counting_function(make_lemma2s(1), 5), DomainError);
  CHECK_THROWS_AS(counting_function(make_primes(), 5), DomainError);
  CHECK_THROWS_AS(counting_function(make_naturals_except({2}), 0), DomainError);
}

TEST_CASE("growth profile rows and classes") {
  const auto rows = growth_profile(make_one_union_multiples(5), {15, 20, 25}, 4);
  // radius-major, window-minor ordering with the header contract
  CHECK(rows.front().radius == 0);
  for (const auto& row : rows) {
    if (row.radius == 0) {
      CHECK(row.count == 1);
      CHECK(row.cls == RadiusClass::FiniteStable);
    }
    if (row.radius == 4) {
      CHECK(row.count == 0);
      CHECK(row.cls == RadiusClass::Zero);
    }
    if (row.radius >= 1 && row.radius <= 3) CHECK(row.cls == RadiusClass::WindowGrowing);
  }
  const auto csv = profile_to_csv(rows);
  CHECK(csv.rfind("radius,window,count,class\n", 0) == 0);
  CHECK(csv.find("window-growing") != std::string::npos);
}

TEST_CASE("primes profile rows are window-growing at every positive radius") {
  // heights 4, 6, 7 keep every length <= 3 while all three radii keep growing
  const auto rows = growth_profile(make_primes(), {4, 6, 7}, 3);
  for (const auto& row : rows) {
    if (row.radius >= 1) CHECK(row.cls == RadiusClass::WindowGrowing);
  }
}

TEST_CASE("odd finite transition sets contain an involution") {
  for (std::int64_t s : {1, 3}) {
    const auto family = make_lemma2s(s);
    const auto t = lemma_t(s);
    const auto report = detect_transition(family, {t + 2, t + 4, t + 6}, 3);
    REQUIRE(report.finite);
    CHECK(report.s % 2 == 1);
    CHECK(transition_set_has_involution(family.spec, report.transition_set));
  }
}

TEST_CASE("transition sets are closed under negation") {
  const auto family = make_nathanson(3, {1, 2});
  const auto report = detect_transition(family, {13, 16, 20}, 3);
  CHECK(report.r == 3);
  CHECK(report.s == 4);
  for (const auto& x : report.transition_set) {
    const auto neg = negate(family.spec, x);
    CHECK(std::binary_search(report.transition_set.begin(), report.transition_set.end(), neg, ElementLess{}));
  }
}

TEST_CASE("set rules evaluate per window") {
  const auto z_spec = GroupSpec::lattice(1, 0);
  const auto w_rule = SetRule::w_symmetric({3, 9});
  CHECK(evaluate_rule(w_rule, z_spec, ObservationWindow{5}).size() == 2);   // only ±3 visible
  CHECK(evaluate_rule(w_rule, z_spec, ObservationWindow{10}).size() == 4);
  const auto ball = SetRule::torsion_ball(2);
  CHECK(evaluate_rule(ball, GroupSpec::lattice(1, 1), ObservationWindow{5}).size() == 3);
  const auto rule_json = rule_to_json(w_rule, z_spec);
  const auto back = rule_from_json(rule_json, z_spec);
  CHECK(rule_to_json(back, z_spec).dump() == rule_json.dump());
}
