#pragma once

#include "phaseforge/group.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace phaseforge {

// Deliberately naive cross-check instrument. Explores ordered sequences
// over the symmetric closure (breadth-first over partial products), a
// different algorithmic path from the engine's multiset enumeration.
// Refuses closures above max_closure and caps above max_cap: it is a test
// instrument, not a production path.
struct OracleOptions {
  std::size_t max_closure = 64;
  int max_cap = 6;
};

class OracleTable {
 public:
  OracleTable(const GroupSpec& spec, const std::vector<GroupElement>& generators, int cap,
              const OracleOptions& opts = {});

  // Minimal sequence length summing to x; nullopt when it exceeds the cap.
  std::optional<int> length(const GroupElement& x) const;

  const GroupSpec& spec() const { return spec_; }
  const std::vector<GroupElement>& closure() const { return closure_; }
  int cap() const { return cap_; }

 private:
  GroupSpec spec_;
  std::vector<GroupElement> closure_;
  int cap_;
  std::unordered_map<GroupElement, int, ElementHash> lengths_;
};

std::optional<int> oracle_length(const GroupSpec& spec, const std::vector<GroupElement>& generators,
                                 const GroupElement& x, int cap, const OracleOptions& opts = {});

// Every minimal-length sequence of closure letters realizing x, in
// lexicographic letter order. Empty when x exceeds the cap.
std::vector<std::vector<GroupElement>> geodesic_words(const GroupSpec& spec,
                                                      const std::vector<GroupElement>& generators,
                                                      const GroupElement& x, int cap,
                                                      const OracleOptions& opts = {});

// Word-length sequence along prefixes: u_j = length(a_1 + ... + a_j).
std::vector<int> prefix_lengths(const OracleTable& table, const std::vector<GroupElement>& word);

// Every contiguous subword of a geodesic word is itself geodesic:
// length(a_i ... a_j) = j - i + 1. Throws DomainError on non-geodesic input.
bool check_cut_lemma(const OracleTable& table, const std::vector<GroupElement>& word);

// Some prefix of a geodesic word has length exactly r, for 0 <= r <= |word|.
// Throws DomainError on non-geodesic input.
bool check_r_sequence(const OracleTable& table, const std::vector<GroupElement>& word, int r);

}  // namespace phaseforge
