#pragma once

#include "phaseforge/bigint.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace phaseforge {

// ─── Group specs ─────────────────────────────────────────────────────────
//
// Ambient groups are either Z^d x (Z/2Z)^k (additive) or the multiplicative
// group of positive rationals modeled by prime-exponent vectors.

struct GroupSpec {
  enum class Kind { Lattice, PositiveRationals };

  Kind kind = Kind::Lattice;
  int free_rank = 0;      // d
  int torsion2_rank = 0;  // k

  static GroupSpec lattice(int d, int k);
  static GroupSpec positive_rationals();

  bool is_lattice() const { return kind == Kind::Lattice; }
  bool operator==(const GroupSpec&) const = default;
};

nlohmann::ordered_json spec_to_json(const GroupSpec& spec);
GroupSpec spec_from_json(const nlohmann::json& j);

// ─── Elements ────────────────────────────────────────────────────────────

struct GroupElement {
  // Lattice: d exact integers plus k bits.
  std::vector<BigInt> free;
  std::vector<std::uint8_t> torsion;
  // PositiveRationals: sparse prime -> nonzero exponent. Never stores zeros.
  std::map<BigInt, BigInt> exponents;

  bool operator==(const GroupElement&) const = default;
};

GroupElement identity_element(const GroupSpec& spec);
bool is_identity(const GroupSpec& spec, const GroupElement& x);

// Throws ShapeError when x does not conform to spec.
void check_shape(const GroupSpec& spec, const GroupElement& x);

GroupElement add(const GroupSpec& spec, const GroupElement& x, const GroupElement& y);
GroupElement negate(const GroupSpec& spec, const GroupElement& x);

// Direct products (Lattice only; PositiveRationals operands are rejected).
GroupSpec product_spec(const GroupSpec& s1, const GroupSpec& s2);
GroupElement product_element(const GroupSpec& s1, const GroupSpec& s2,
                             const GroupElement& x, const GroupElement& y);
GroupElement project_left(const GroupSpec& s1, const GroupSpec& s2, const GroupElement& xy);
GroupElement project_right(const GroupSpec& s1, const GroupSpec& s2, const GroupElement& xy);

// Canonical total order: free parts lexicographic, then torsion, then
// exponent maps. Serialization and window enumeration use this order.
int compare_elements(const GroupElement& a, const GroupElement& b);

struct ElementLess {
  bool operator()(const GroupElement& a, const GroupElement& b) const {
    return compare_elements(a, b) < 0;
  }
};

std::size_t element_hash(const GroupElement& x);

struct ElementHash {
  std::size_t operator()(const GroupElement& x) const { return element_hash(x); }
};

// Max absolute free coordinate (0 for torsion-only elements). Lattice only.
BigInt magnitude_inf(const GroupElement& x);

// ─── Canonical encodings ─────────────────────────────────────────────────
//
// Lattice: {"free":["3","-2"],"tor":[1,0]}; Q+: {"primes":{"2":"3","5":"-1"}}.
// Decimal strings keep big integers bit-exact.

nlohmann::ordered_json element_to_json(const GroupSpec& spec, const GroupElement& x);
GroupElement element_from_json(const GroupSpec& spec, const nlohmann::json& j);

// Compact CSV-safe text form: "3:-2#10" for lattice, "12/5" for Q+.
std::string element_to_text(const GroupSpec& spec, const GroupElement& x);

// ─── Q+ helpers ──────────────────────────────────────────────────────────

struct Rational {
  BigInt num{1};
  BigInt den{1};  // both positive, gcd(num, den) = 1
};

Rational rational_from_exponents(const std::map<BigInt, BigInt>& exps);
// Trial-division factorization; inputs must fit in 64 bits.
std::map<BigInt, BigInt> exponents_from_rational(const Rational& q);
Rational rational_mul(const Rational& a, const Rational& b);
Rational rational_inv(const Rational& a);

bool is_prime_u64(std::uint64_t n);
std::uint64_t nth_prime(std::size_t index0);  // 0 -> 2, 1 -> 3, ...

}  // namespace phaseforge
