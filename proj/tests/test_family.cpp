#include "phaseforge/family.hpp"

#include "phaseforge/errors.hpp"
#include "phaseforge/window.hpp"

#include "doctest.h"

#include <set>

using namespace phaseforge;

namespace {

GroupElement z(std::int64_t n) {
  GroupElement x;
  x.free.push_back(n);
  return x;
}

GroupElement zz2(std::int64_t n, std::uint8_t bit) {
  GroupElement x;
  x.free.push_back(n);
  x.torsion.push_back(bit);
  return x;
}

std::vector<BigInt> values_of(const std::vector<GroupElement>& members) {
  std::vector<BigInt> out;
  for (const auto& m : members) out.push_back(m.free[0]);
  return out;
}

}  // namespace

TEST_CASE("nathanson sequence: minimal instantiation") {
  const std::vector<std::int64_t> W{2};
  std::vector<BigInt> prefix;
  for (std::size_t i = 1; i <= 6; ++i) prefix.push_back(nathanson_sequence(3, W, i));
  CHECK(prefix == std::vector<BigInt>{3, 4, 7, 9, 12, 15});
  CHECK(nathanson_sequence(4, {1, 3}, 1) == 4);
  CHECK_THROWS_AS(nathanson_sequence(2, {1}, 1), DomainError);
}

TEST_CASE("nathanson sequence: defining recurrence recovers the index") {
  for (int r : {3, 4, 5}) {
    for (std::size_t i = 1; i <= 5; ++i) {
      const auto even = nathanson_sequence(r, {2}, 2 * i);
      const auto odd = nathanson_sequence(r, {2}, 2 * i - 1);
      CHECK(even - BigInt(r - 2) * odd == BigInt(i));
    }
  }
}

TEST_CASE("nathanson sequence: strict growth inequalities") {
  for (int r : {3, 5}) {
    const std::vector<std::int64_t> W{1, 4};
    const BigInt mw = 4;
    for (std::size_t i = 1; i <= 30; ++i) {
      const auto a1 = nathanson_sequence(r, W, 2 * i - 1);
      const auto a2 = nathanson_sequence(r, W, 2 * i);
      const auto a3 = nathanson_sequence(r, W, 2 * i + 1);
      CHECK(a1 < a2);
      CHECK(a2 < BigInt(r - 2) * a2 + mw);
      CHECK(BigInt(r - 2) * a2 + mw < a3);
    }
  }
}

TEST_CASE("nathanson overrides are validated and extended minimally") {
  // a_1 = 10 > max(W); a_2 = 10 + 1 = 11 forced by the recurrence
  const auto family = make_nathanson(3, {2}, {BigInt(10)});
  const auto members = first_members(family, 2);
  CHECK(values_of(members) == std::vector<BigInt>{10, 11});
  CHECK_THROWS_AS(make_nathanson(3, {5}, {BigInt(4)}), DomainError);  // a_1 must exceed max(W)
}

TEST_CASE("lemma3s sequence: gap inequality holds for enumerated terms") {
  for (std::int64_t s : {1, 3, 7}) {
    const auto t = lemma_t(s);
    for (std::size_t k = 1; k <= 40; ++k) {
      const auto ak = lemma3s_sequence(s, k);
      const auto next = lemma3s_sequence(s, k + 1);
      CHECK(ak + BigInt(2 * k) + t < next);
    }
  }
}

TEST_CASE("lemma2s members: torsion stream starts at t") {
  const auto family = make_lemma2s(3);
  const auto members = first_members(family, 6);
  CHECK(members[0] == zz2(1, 0));
  CHECK(members[1] == zz2(2, 1));  // t = 2
  CHECK(members[2] == zz2(2, 0));
  CHECK(members[3] == zz2(3, 1));
  CHECK(is_member(family, zz2(2, 1)));
  CHECK_FALSE(is_member(family, zz2(1, 1)));
  CHECK_FALSE(is_member(family, zz2(-1, 0)));
}

TEST_CASE("lemma3s members: third kind is (a_k + 2k, 1)") {
  const auto family = make_lemma3s(1);  // t = 1, a = 1, 5, 11, 19, ...
  CHECK(is_member(family, zz2(3, 1)));   // a_1 + 2
  CHECK(is_member(family, zz2(9, 1)));   // a_2 + 4
  CHECK(is_member(family, zz2(17, 1)));  // a_3 + 6
  CHECK(is_member(family, zz2(1, 0)));
  CHECK(is_member(family, zz2(2, 0)));   // a_1 + 1
  CHECK_FALSE(is_member(family, zz2(4, 1)));
  CHECK_FALSE(is_member(family, zz2(3, 0)));
}

TEST_CASE("builders validate their domains") {
  CHECK_THROWS_WITH_AS(make_lemma2s(4), "lemma2s: s must be odd", DomainError);
  CHECK_THROWS_AS(make_lemma3s(0), DomainError);
  CHECK_THROWS_WITH_AS(make_naturals_except({}), "naturals_except: W must be nonempty", DomainError);
  CHECK_THROWS_AS(make_naturals_except({0}), DomainError);
  CHECK_THROWS_AS(make_one_union_multiples(0), DomainError);
  CHECK_THROWS_AS(make_coordinate_axes(0), DomainError);
  CHECK_THROWS_AS(make_nathanson(2, {1}), DomainError);
  CHECK_THROWS_AS(build_odd_phase(1, 1), DomainError);
  CHECK_THROWS_AS(build_odd_phase(3, 2), DomainError);
  CHECK_THROWS_AS(make_explicit_finite(GroupSpec::lattice(1, 0), {}), DomainError);
}

TEST_CASE("naturals_except membership is set difference") {
  const auto family = make_naturals_except({5});
  CHECK_FALSE(is_member(family, z(5)));
  CHECK(is_member(family, z(4)));
  CHECK_FALSE(is_member(family, z(0)));
  CHECK_FALSE(is_member(family, z(-3)));
}

TEST_CASE("one_union_multiples handles m = 1") {
  const auto family = make_one_union_multiples(1);
  const auto members = first_members(family, 5);
  CHECK(values_of(members) == std::vector<BigInt>{1, 2, 3, 4, 5});
}

TEST_CASE("product_sum: one-sided embeddings only") {
  const auto f = product_sum(make_lemma2s(1), make_lemma2s(1));
  CHECK(f.spec == GroupSpec::lattice(2, 2));
  const auto a_members = first_members(*f.left, 5);
  for (const auto& a : a_members) {
    GroupElement embedded = product_element(f.left->spec, f.right->spec, a, identity_element(f.right->spec));
    CHECK(is_member(f, embedded));
  }
  // no member has both components away from the identity
  GroupElement both = product_element(f.left->spec, f.right->spec, zz2(1, 0), zz2(1, 0));
  CHECK_FALSE(is_member(f, both));
  for (const auto& m : first_members(f, 50)) {
    const auto x1 = project_left(f.left->spec, f.right->spec, m);
    const auto x2 = project_right(f.left->spec, f.right->spec, m);
    CHECK((is_identity(f.left->spec, x1) || is_identity(f.right->spec, x2)));
  }
}

TEST_CASE("product_max: pair block reaches every pair at a finite index") {
  const auto f = product_max(make_naturals_except({1}), make_naturals_except({2}));
  const auto l = first_members(*f.left, 5);
  const auto r = first_members(*f.right, 5);
  const auto pair = product_element(f.left->spec, f.right->spec, l[3], r[4]);
  CHECK(is_member(f, pair));
  const auto members = first_members(f, 200);
  CHECK(std::find(members.begin(), members.end(), pair) != members.end());
  // embedded one-sided members still present
  const auto embedded = product_element(f.left->spec, f.right->spec, l[0], identity_element(f.right->spec));
  CHECK(std::find(members.begin(), members.end(), embedded) != members.end());
}

TEST_CASE("build_odd_phase folds lemma families") {
  CHECK(canonical_family_json(build_odd_phase(2, 5)) == canonical_family_json(make_lemma2s(5)));
  CHECK(canonical_family_json(build_odd_phase(3, 3)) == canonical_family_json(make_lemma3s(3)));
  CHECK(build_odd_phase(4, 3).spec == GroupSpec::lattice(2, 2));
  CHECK(build_odd_phase(5, 1).spec == GroupSpec::lattice(2, 2));
  CHECK(build_odd_phase(7, 1).spec == GroupSpec::lattice(3, 3));
}

TEST_CASE("closed forms") {
  const auto axes = make_coordinate_axes(3);
  GroupElement x;
  x.free = {0, 5, -2};
  CHECK(closed_form_length(axes, x) == 2);
  CHECK(closed_form_length(axes, identity_element(axes.spec)) == 0);

  const auto primes = make_primes();
  GroupElement twelve;
  twelve.exponents = {{2, 2}, {3, 1}};
  CHECK(closed_form_length(primes, twelve) == 3);
  CHECK(closed_form_length(primes, identity_element(primes.spec)) == 0);

  CHECK_FALSE(closed_form_length(make_naturals_except({1}), z(3)).has_value());
}

TEST_CASE("enumeration is injective and agrees with membership") {
  std::vector<GeneratorFamily> families;
  families.push_back(make_naturals_except({2, 5}));
  families.push_back(make_one_union_multiples(4));
  families.push_back(make_coordinate_axes(2));
  families.push_back(make_primes());
  families.push_back(make_nathanson(3, {2}));
  families.push_back(make_lemma2s(5));
  families.push_back(make_lemma3s(3));
  families.push_back(product_sum(make_naturals_except({1}), make_lemma2s(1)));
  families.push_back(product_max(make_naturals_except({1}), make_naturals_except({2})));
  for (const auto& family : families) {
    const auto members = first_members(family, 200);
    REQUIRE(members.size() == 200);
    std::set<GroupElement, ElementLess> distinct(members.begin(), members.end());
    CHECK(distinct.size() == 200);  // injective
    for (const auto& m : members) CHECK(is_member(family, m));
  }
}

TEST_CASE("no non-member below the 200th member magnitude passes membership") {
  // integer families: scan every integer up to the 200th member
  for (const auto& family : {make_naturals_except({2, 5}), make_one_union_multiples(4),
                             make_nathanson(3, {2})}) {
    const auto members = first_members(family, 200);
    const auto member_values = values_of(members);
    const std::set<BigInt> values(member_values.begin(), member_values.end());
    const BigInt top = *values.rbegin();
    if (top > 100000) continue;  // scan only when dense enough to afford it
    for (BigInt v = -top; v <= top; ++v) {
      GroupElement x;
      x.free.push_back(v);
      CHECK(is_member(family, x) == (values.count(v) > 0));
    }
  }
  // lemma kinds: scan both torsion classes. The streams interleave, so members
  // beyond index 200 can still sit below the 200th member's magnitude; compare
  // against an enumeration long enough to cover the whole magnitude range.
  for (const auto& family : {make_lemma2s(5), make_lemma3s(1)}) {
    const auto members = first_members(family, 200);
    BigInt top = 0;
    for (const auto& m : members) top = std::max(top, m.free[0]);
    if (top > 5000) top = 5000;
    const auto covering = first_members(family, 1200);
    REQUIRE(covering.back().free[0] > top);
    std::set<GroupElement, ElementLess> in_set(covering.begin(), covering.end());
    for (BigInt v = -top; v <= top; ++v) {
      for (std::uint8_t bit : {0, 1}) {
        GroupElement x;
        x.free.push_back(v);
        x.torsion.push_back(bit);
        CHECK(is_member(family, x) == (in_set.count(x) > 0));
      }
    }
  }
  // primes: single-prime maps only, plus a few structured non-members
  {
    const auto family = make_primes();
    const auto members = first_members(family, 200);
    const BigInt top = members.back().exponents.begin()->first;
    for (BigInt p = 2; p <= top; ++p) {
      GroupElement x;
      x.exponents = {{p, 1}};
      CHECK(is_member(family, x) == is_prime_u64(p.convert_to<std::uint64_t>()));
    }
    GroupElement square;
    square.exponents = {{2, 2}};
    CHECK_FALSE(is_member(family, square));
    GroupElement inverse;
    inverse.exponents = {{2, -1}};
    CHECK_FALSE(is_member(family, inverse));
  }
}

TEST_CASE("truncation hints are monotone in window and cap") {
  std::vector<GeneratorFamily> families;
  families.push_back(make_naturals_except({3}));
  families.push_back(make_one_union_multiples(5));
  families.push_back(make_coordinate_axes(2));
  families.push_back(make_primes());
  families.push_back(make_nathanson(4, {1, 3}));
  families.push_back(make_lemma2s(7));
  families.push_back(make_lemma3s(5));
  families.push_back(product_sum(make_naturals_except({1}), make_naturals_except({2})));
  families.push_back(product_max(make_naturals_except({1}), make_naturals_except({2})));
  const std::vector<std::int64_t> windows{2, 5, 10, 20};
  const std::vector<int> caps{1, 2, 3, 5};
  for (const auto& family : families) {
    for (std::size_t wi = 1; wi < windows.size(); ++wi) {
      for (int cap : caps) {
        CHECK(truncation_hint(family, windows[wi], cap) >= truncation_hint(family, windows[wi - 1], cap));
      }
    }
    for (std::size_t ci = 1; ci < caps.size(); ++ci) {
      for (auto n : windows) {
        CHECK(truncation_hint(family, n, caps[ci]) >= truncation_hint(family, n, caps[ci - 1]));
      }
    }
  }
}

TEST_CASE("descriptor JSON round-trips losslessly") {
  std::vector<GeneratorFamily> families;
  families.push_back(make_naturals_except({5, 2}));
  families.push_back(make_one_union_multiples(6));
  families.push_back(make_coordinate_axes(3));
  families.push_back(make_primes());
  families.push_back(make_nathanson(4, {1, 3}));
  families.push_back(make_nathanson(3, {2}, {BigInt(10)}));
  families.push_back(make_lemma2s(3));
  families.push_back(make_lemma3s(5, {BigInt(2)}));
  families.push_back(product_sum(make_lemma2s(1), make_lemma2s(3)));
  families.push_back(product_max(make_naturals_except({1}), make_coordinate_axes(2)));
  families.push_back(make_explicit_finite(GroupSpec::lattice(1, 1), {zz2(3, 1), zz2(4, 0)}));
  for (const auto& family : families) {
    const auto text = canonical_family_json(family);
    const auto reparsed = family_from_json(nlohmann::json::parse(text));
    CHECK(canonical_family_json(reparsed) == text);
  }
  CHECK(canonical_family_json(make_naturals_except({5, 2})) == R"({"kind":"naturals_except","W":[2,5]})");
  CHECK(canonical_family_json(make_nathanson(3, {2})) == R"({"kind":"nathanson","r":3,"W":[2]})");
}

TEST_CASE("odd_phase descriptor expands to the folded construction") {
  const auto parsed = family_from_json(nlohmann::json::parse(R"({"kind":"odd_phase","r":5,"s":3})"));
  CHECK(canonical_family_json(parsed) == canonical_family_json(build_odd_phase(5, 3)));
  CHECK_THROWS_AS(family_from_json(nlohmann::json::parse(R"({"kind":"odd_phase","r":4,"s":2})")), DomainError);
}

TEST_CASE("family JSON names the offending field") {
  CHECK_THROWS_WITH_AS(family_from_json(nlohmann::json::parse(R"({"kind":"lemma2s","s":4})")),
                       "lemma2s: s must be odd", DomainError);
  CHECK_THROWS_WITH_AS(family_from_json(nlohmann::json::parse(R"({"kind":"naturals_except","W":[]})")),
                       "naturals_except: W must be nonempty", DomainError);
  CHECK_THROWS_AS(family_from_json(nlohmann::json::parse(R"({"kind":"widgets"})")), DomainError);
}

TEST_CASE("generation certificates") {
  std::string note;
  CHECK(verify_generates(make_naturals_except({1, 2, 3}), &note));
  CHECK(verify_generates(make_one_union_multiples(9)));
  CHECK(verify_generates(make_coordinate_axes(3)));
  CHECK(verify_generates(make_primes()));
  CHECK(verify_generates(make_nathanson(5, {1, 2})));
  CHECK(verify_generates(make_lemma2s(7)));
  CHECK(verify_generates(make_lemma3s(3)));
  CHECK(verify_generates(product_sum(make_lemma2s(1), make_lemma2s(3))));
  // {2} only reaches 2Z
  CHECK_FALSE(verify_generates(make_explicit_finite(GroupSpec::lattice(1, 0), {z(2)}), &note));
  CHECK(verify_generates(make_explicit_finite(GroupSpec::lattice(1, 0), {z(2), z(3)})));
}

TEST_CASE("finite family detection") {
  CHECK(is_finite_family(make_explicit_finite(GroupSpec::lattice(1, 0), {z(1)})));
  CHECK_FALSE(is_finite_family(make_primes()));
  CHECK_FALSE(is_finite_family(product_sum(make_naturals_except({1}), make_naturals_except({2}))));
}
