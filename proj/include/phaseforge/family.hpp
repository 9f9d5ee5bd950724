#pragma once

#include "phaseforge/group.hpp"

#include "json.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phaseforge {

// Finite descriptions of (possibly infinite) symmetric-closed generating
// sets. Enumeration is injective, deterministic and ordered by a total
// index; membership agrees with enumeration. The symmetric closure
// A u (-A) is applied by consumers, never stored.
enum class FamilyKind {
  ExplicitFinite,
  NaturalsExcept,      // A = N \ W over Z
  OneUnionMultiples,   // A = {1} u {m, 2m, 3m, ...} over Z
  CoordinateAxes,      // axis lattice points over Z^r
  Primes,              // P over Q+
  Nathanson,           // interval-sequence set over Z, r >= 3
  Lemma2s,             // over Z x (Z/2Z), phase (2, s)
  Lemma3s,             // over Z x (Z/2Z), phase (3, s)
  ProductSum,          // (A1 x {e}) u ({e} x A2)
  ProductMax,          // (A1 x A2) u (A1 x {e}) u ({e} x A2)
};

struct GeneratorFamily {
  GroupSpec spec;
  FamilyKind kind = FamilyKind::ExplicitFinite;

  std::vector<GroupElement> members;           // ExplicitFinite
  std::vector<std::int64_t> W;                 // NaturalsExcept, Nathanson (sorted, unique)
  std::int64_t m = 0;                          // OneUnionMultiples
  int rank = 0;                                // CoordinateAxes
  int r = 0;                                   // Nathanson
  std::int64_t s = 0;                          // Lemma2s / Lemma3s
  std::vector<BigInt> seq_override;            // Nathanson odd-index terms / Lemma3s a_k prefix
  std::shared_ptr<const GeneratorFamily> left; // products
  std::shared_ptr<const GeneratorFamily> right;
};

// t = (s+1)/2 for the odd-transition constructions.
std::int64_t lemma_t(std::int64_t s);

// ─── Builders (validated) ────────────────────────────────────────────────

GeneratorFamily make_explicit_finite(const GroupSpec& spec, std::vector<GroupElement> members);
GeneratorFamily make_naturals_except(std::vector<std::int64_t> W);
GeneratorFamily make_one_union_multiples(std::int64_t m);
GeneratorFamily make_coordinate_axes(int r);
GeneratorFamily make_primes();
// Minimal admissible sequence unless odd-index overrides are supplied.
GeneratorFamily make_nathanson(int r, std::vector<std::int64_t> W,
                               std::vector<BigInt> odd_override = {});
GeneratorFamily make_lemma2s(std::int64_t s);
GeneratorFamily make_lemma3s(std::int64_t s, std::vector<BigInt> seq_override = {});
GeneratorFamily product_sum(const GeneratorFamily& f1, const GeneratorFamily& f2);
GeneratorFamily product_max(const GeneratorFamily& f1, const GeneratorFamily& f2);
// Even r: Lemma2s(s) folded with copies of Lemma2s(1); odd r: Lemma3s(s)
// folded likewise. Resulting spec is Lattice(floor(r/2), floor(r/2)).
GeneratorFamily build_odd_phase(int r, std::int64_t s);

// ─── Sequences ───────────────────────────────────────────────────────────

// a_1 = max(W)+1; a_{2i} = (r-2) a_{2i-1} + i; a_{2i+1} = (r-2) a_{2i} + max(W) + 1.
// Overrides replace odd-index terms and are validated against the strict
// inequalities the construction requires. 1-based index.
BigInt nathanson_sequence(int r, const std::vector<std::int64_t>& W, std::size_t index,
                          const std::vector<BigInt>& odd_override = {});

// a_1 = 1; a_{k+1} = a_k + 2k + t + 1 (minimal choice); validated override prefix.
BigInt lemma3s_sequence(std::int64_t s, std::size_t index,
                        const std::vector<BigInt>& seq_override = {});

// ─── Family operations ───────────────────────────────────────────────────

// First `count` members in enumeration order (fewer when the family is finite).
std::vector<GroupElement> first_members(const GeneratorFamily& family, std::size_t count);

bool is_member(const GeneratorFamily& family, const GroupElement& x);

// Exact word length by formula for CoordinateAxes (nonzero-coordinate count)
// and Primes (sum of |exponents|); absent for other kinds.
std::optional<int> closed_form_length(const GeneratorFamily& family, const GroupElement& x);

// Engineering starting point for truncation: enough enumerated members that
// word lengths <= cap inside the window are expected to be final. Validated
// at runtime by stabilization, never trusted blindly. Monotone in both args.
std::size_t truncation_hint(const GeneratorFamily& family, std::int64_t window_bound, int cap);

// Certified-by-construction generation check (per kind); note explains the witness.
bool verify_generates(const GeneratorFamily& family, std::string* note = nullptr);

bool is_finite_family(const GeneratorFamily& family);

// True when the family lives over Z = Lattice(1,0) with a strictly
// increasing positive enumeration (counting-function support).
bool has_increasing_positive_enumeration(const GeneratorFamily& family);

// ─── Descriptors ─────────────────────────────────────────────────────────

nlohmann::ordered_json family_to_json(const GeneratorFamily& family);
GeneratorFamily family_from_json(const nlohmann::json& j);
// Compact dump of family_to_json; cache keys and round-trip tests rely on it.
std::string canonical_family_json(const GeneratorFamily& family);

}  // namespace phaseforge
