#include "phaseforge/oracle.hpp"

#include "phaseforge/engine.hpp"
#include "phaseforge/errors.hpp"

#include <algorithm>

namespace phaseforge {

OracleTable::OracleTable(const GroupSpec& spec, const std::vector<GroupElement>& generators, int cap,
                         const OracleOptions& opts)
    : spec_(spec), cap_(cap) {
  if (cap < 0) throw DomainError("oracle: cap must be nonnegative");
  if (cap > opts.max_cap) {
    throw DomainError("oracle: cap " + std::to_string(cap) + " exceeds the configured limit " +
                      std::to_string(opts.max_cap));
  }
  closure_ = symmetric_closure(spec, generators);
  if (closure_.size() > opts.max_closure) {
    throw DomainError("oracle: symmetric closure has " + std::to_string(closure_.size()) +
                      " elements, above the configured limit " + std::to_string(opts.max_closure));
  }
  // Breadth-first over partial products: layer j holds every value reachable
  // by some length-j sequence and no shorter one.
  std::vector<GroupElement> frontier{identity_element(spec)};
  lengths_.emplace(frontier.front(), 0);
  for (int j = 1; j <= cap_ && !frontier.empty(); ++j) {
    std::vector<GroupElement> next;
    for (const auto& v : frontier) {
      for (const auto& g : closure_) {
        GroupElement w = add(spec_, v, g);
        if (lengths_.emplace(w, j).second) next.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
}

std::optional<int> OracleTable::length(const GroupElement& x) const {
  check_shape(spec_, x);
  auto it = lengths_.find(x);
  if (it == lengths_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> oracle_length(const GroupSpec& spec, const std::vector<GroupElement>& generators,
                                 const GroupElement& x, int cap, const OracleOptions& opts) {
  return OracleTable(spec, generators, cap, opts).length(x);
}

std::vector<std::vector<GroupElement>> geodesic_words(const GroupSpec& spec,
                                                      const std::vector<GroupElement>& generators,
                                                      const GroupElement& x, int cap,
                                                      const OracleOptions& opts) {
  OracleTable table(spec, generators, cap, opts);
  const auto len = table.length(x);
  std::vector<std::vector<GroupElement>> words;
  if (!len.has_value()) return words;
  if (*len == 0) {
    words.push_back({});
    return words;
  }
  // Extend prefixes letter by letter; a prefix survives iff the remainder is
  // realizable in exactly the remaining number of letters.
  std::vector<GroupElement> word;
  GroupElement sum = identity_element(spec);
  auto extend = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      if (sum == x) words.push_back(word);
      return;
    }
    for (const auto& g : table.closure()) {
      GroupElement next_sum = add(spec, sum, g);
      const auto rest = table.length(add(spec, x, negate(spec, next_sum)));
      if (!rest.has_value() || *rest > remaining - 1) continue;
      word.push_back(g);
      std::swap(sum, next_sum);
      self(self, remaining - 1);
      std::swap(sum, next_sum);
      word.pop_back();
    }
  };
  extend(extend, *len);
  return words;
}

std::vector<int> prefix_lengths(const OracleTable& table, const std::vector<GroupElement>& word) {
  std::vector<int> out;
  out.reserve(word.size() + 1);
  GroupElement sum = identity_element(table.spec());
  auto record = [&](const GroupElement& v) {
    const auto len = table.length(v);
    if (!len.has_value()) {
      throw DomainError("prefix_lengths: a prefix exceeds the oracle cap; raise the cap");
    }
    out.push_back(*len);
  };
  record(sum);
  for (const auto& letter : word) {
    sum = add(table.spec(), sum, letter);
    record(sum);
  }
  return out;
}

namespace {

void require_geodesic(const OracleTable& table, const std::vector<GroupElement>& word) {
  if (word.empty()) return;
  if (static_cast<int>(word.size()) > table.cap()) {
    throw DomainError("word longer than the oracle cap");
  }
  for (const auto& letter : word) {
    if (!std::binary_search(table.closure().begin(), table.closure().end(), letter, ElementLess{})) {
      throw DomainError("word contains a letter outside the symmetric closure");
    }
  }
  GroupElement sum = identity_element(table.spec());
  for (const auto& letter : word) sum = add(table.spec(), sum, letter);
  const auto len = table.length(sum);
  if (!len.has_value() || *len != static_cast<int>(word.size())) {
    throw DomainError("word is not geodesic: oracle length differs from word length");
  }
}

}  // namespace

bool check_cut_lemma(const OracleTable& table, const std::vector<GroupElement>& word) {
  require_geodesic(table, word);
  for (std::size_t i = 0; i < word.size(); ++i) {
    GroupElement sum = identity_element(table.spec());
    for (std::size_t j = i; j < word.size(); ++j) {
      sum = add(table.spec(), sum, word[j]);
      const auto len = table.length(sum);
      if (!len.has_value() || *len != static_cast<int>(j - i + 1)) return false;
    }
  }
  return true;
}

bool check_r_sequence(const OracleTable& table, const std::vector<GroupElement>& word, int r) {
  require_geodesic(table, word);
  if (r < 0 || r > static_cast<int>(word.size())) {
    throw DomainError("check_r_sequence: r must satisfy 0 <= r <= |word|");
  }
  const auto prefixes = prefix_lengths(table, word);
  return std::find(prefixes.begin(), prefixes.end(), r) != prefixes.end();
}

}  // namespace phaseforge
