#pragma once

#include "phaseforge/family.hpp"
#include "phaseforge/group.hpp"
#include "phaseforge/window.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phaseforge {

// ─── Length tables ───────────────────────────────────────────────────────
//
// Word lengths of every window element at a fixed truncation level K and
// cap. nullopt means the length exceeds the cap. Lengths computed at level
// K upper-bound the true lengths; equality is certified via stabilization.

struct LengthTable {
  std::int64_t window_bound = 1;
  int cap = 1;
  std::size_t truncation = 1;  // generators actually used (<= requested K)
  bool certified = false;
  std::vector<std::pair<GroupElement, std::optional<int>>> entries;  // canonical order
};

bool same_entries(const LengthTable& a, const LengthTable& b);
std::optional<int> table_lookup(const LengthTable& table, const GroupElement& x);

nlohmann::ordered_json table_to_json(const GroupSpec& spec, const LengthTable& table);
LengthTable table_from_json(const GroupSpec& spec, const nlohmann::json& j);
std::string table_to_csv(const GroupSpec& spec, const LengthTable& table);

// ─── Core operations ─────────────────────────────────────────────────────

// Exact minimum multiset size <= cap over the symmetric closure of the
// first K enumerated generators whose sum is x; nullopt past the cap.
std::optional<int> word_length(const GeneratorFamily& family, const GroupElement& x, int cap,
                               std::size_t truncation);

LengthTable build_length_table(const GeneratorFamily& family, const ObservationWindow& window,
                               int cap, std::size_t truncation);

// Window elements with word length exactly r (table built at cap = r).
std::vector<GroupElement> sphere(const GeneratorFamily& family, int r,
                                 const ObservationWindow& window, std::size_t truncation);

struct GrowthCount {
  std::int64_t count = 0;
  ObservationWindow window;
};

// Sphere cardinality, always reported with its window.
GrowthCount growth_count(const GeneratorFamily& family, int r, const ObservationWindow& window,
                         std::size_t truncation);

// ─── Stabilization ───────────────────────────────────────────────────────
//
// Tables are computed at K = hint, 2*hint, 3*hint, ... and the first table
// equal to its successor twice in a row is returned; that is this
// artifact's definition of a certified table.

struct StabilizeOptions {
  std::optional<std::size_t> hint_override;
  std::size_t max_levels = 32;
};

struct StabilizationCertificate {
  std::vector<std::size_t> levels;     // every K computed, in order
  std::array<std::size_t, 3> agreeing{};  // the first three agreeing K values
};

struct CertifiedTable {
  LengthTable table;
  StabilizationCertificate certificate;
};

CertifiedTable stabilize_table(const GeneratorFamily& family, const ObservationWindow& window,
                               int cap, const StabilizeOptions& opts = {});

// ─── Multiset enumeration strategy ───────────────────────────────────────
//
// Visits every multiset of size <= cap over the symmetric closure of
// `generators` exactly once, in nondecreasing size order. With pruning,
// branches whose partial sum provably cannot re-enter the box given
// remaining budget x max generator magnitude are skipped; a multiset whose
// sum lies in the box is never skipped.

struct EnumerationPruning {
  std::vector<BigInt> lo, hi;        // per free coordinate (lattice only)
  BigInt extra_step_magnitude{0};    // allowance for consumer-side moves per step
};

using MultisetVisitor =
    std::function<void(const std::vector<std::size_t>& closure_indices, const GroupElement& sum)>;

// Deduplicated A u (-A), canonically sorted.
std::vector<GroupElement> symmetric_closure(const GroupSpec& spec,
                                            const std::vector<GroupElement>& generators);

void enumerate_multisets(const GroupSpec& spec, const std::vector<GroupElement>& generators,
                         int cap, const EnumerationPruning* pruning, const MultisetVisitor& visit);

}  // namespace phaseforge
