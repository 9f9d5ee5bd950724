#include "phaseforge/engine.hpp"

#include "phaseforge/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace phaseforge {

namespace mp = boost::multiprecision;

namespace {

constexpr std::size_t kCellBudget = 4'000'000;   // dense DP box size limit
constexpr std::uint8_t kUnreached = 255;
// Small generators must leave headroom for cap * coordinate sums in int64.
constexpr std::int64_t kSmallCoordGuard = (std::numeric_limits<std::int64_t>::max() / 64) / 8;

struct Box {
  std::vector<BigInt> lo, hi;  // per free coordinate
};

Box hull_of(const std::vector<GroupElement>& targets, int d) {
  Box box;
  box.lo.assign(static_cast<std::size_t>(d), 0);
  box.hi.assign(static_cast<std::size_t>(d), 0);
  bool first = true;
  for (const auto& t : targets) {
    for (int c = 0; c < d; ++c) {
      const BigInt& v = t.free[static_cast<std::size_t>(c)];
      if (first || v < box.lo[static_cast<std::size_t>(c)]) box.lo[static_cast<std::size_t>(c)] = v;
      if (first || v > box.hi[static_cast<std::size_t>(c)]) box.hi[static_cast<std::size_t>(c)] = v;
    }
    first = false;
  }
  return box;
}

BigInt box_distance(const std::vector<BigInt>& sigma, const Box& box) {
  BigInt dist = 0;
  for (std::size_t c = 0; c < sigma.size(); ++c) {
    if (sigma[c] < box.lo[c]) {
      BigInt d = box.lo[c] - sigma[c];
      if (d > dist) dist = d;
    } else if (sigma[c] > box.hi[c]) {
      BigInt d = sigma[c] - box.hi[c];
      if (d > dist) dist = d;
    }
  }
  return dist;
}

std::uint32_t torsion_bits(const GroupElement& x) {
  std::uint32_t bits = 0;
  for (auto b : x.torsion) bits = (bits << 1) | b;
  return bits;
}

// ─── Dense BFS table over the small generators ───────────────────────────
//
// Sums of <= cap small generators stay inside the per-coordinate box
// [-B_c, B_c], so a breadth-first sweep enumerates every reachable small
// multiset sum with its exact minimum size. No truncation is involved.

class SmallSumTable {
 public:
  SmallSumTable(int d, int k, int cap, const std::vector<std::vector<std::int64_t>>& gen_coords,
                const std::vector<std::uint32_t>& gen_tor) {
    d_ = d;
    k_ = k;
    bounds_.assign(static_cast<std::size_t>(d), 0);
    for (const auto& g : gen_coords) {
      for (int c = 0; c < d; ++c) {
        bounds_[static_cast<std::size_t>(c)] =
            std::max(bounds_[static_cast<std::size_t>(c)], std::abs(g[static_cast<std::size_t>(c)]) * cap);
      }
    }
    strides_.assign(static_cast<std::size_t>(d), 1);
    std::size_t cells = 1u << k;
    tor_span_ = cells;
    for (int c = d - 1; c >= 0; --c) {
      strides_[static_cast<std::size_t>(c)] = cells;
      cells *= static_cast<std::size_t>(2 * bounds_[static_cast<std::size_t>(c)] + 1);
    }
    dist_.assign(cells, kUnreached);

    // BFS by multiset size; each cell is finalized the first time it is hit.
    std::vector<std::size_t> frontier;
    const std::size_t origin = index_of(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), 0);
    dist_[origin] = 0;
    frontier.push_back(origin);
    std::vector<std::int64_t> coords(static_cast<std::size_t>(d));
    for (int level = 1; level <= cap && !frontier.empty(); ++level) {
      std::vector<std::size_t> next;
      for (std::size_t idx : frontier) {
        decode(idx, coords);
        const std::uint32_t tor = static_cast<std::uint32_t>(idx % tor_span_);
        for (std::size_t gi = 0; gi < gen_coords.size(); ++gi) {
          bool ok = true;
          std::size_t base = 0;
          for (int c = 0; c < d_; ++c) {
            const std::int64_t v = coords[static_cast<std::size_t>(c)] + gen_coords[gi][static_cast<std::size_t>(c)];
            if (v < -bounds_[static_cast<std::size_t>(c)] || v > bounds_[static_cast<std::size_t>(c)]) {
              ok = false;
              break;
            }
            base += static_cast<std::size_t>(v + bounds_[static_cast<std::size_t>(c)]) *
                    strides_[static_cast<std::size_t>(c)];
          }
          if (!ok) continue;
          const std::size_t idx2 = base + (tor ^ gen_tor[gi]);
          if (dist_[idx2] == kUnreached) {
            dist_[idx2] = static_cast<std::uint8_t>(level);
            next.push_back(idx2);
          }
        }
      }
      frontier = std::move(next);
    }
  }

  std::int64_t bound(int c) const { return bounds_[static_cast<std::size_t>(c)]; }

  // Minimum small-multiset size summing to (coords, tor); kUnreached if none.
  std::uint8_t lookup(const std::vector<std::int64_t>& coords, std::uint32_t tor) const {
    std::size_t base = 0;
    for (int c = 0; c < d_; ++c) {
      const std::int64_t v = coords[static_cast<std::size_t>(c)];
      if (v < -bounds_[static_cast<std::size_t>(c)] || v > bounds_[static_cast<std::size_t>(c)]) return kUnreached;
      base += static_cast<std::size_t>(v + bounds_[static_cast<std::size_t>(c)]) * strides_[static_cast<std::size_t>(c)];
    }
    return dist_[base + tor];
  }

  static std::size_t cell_count(int d, int k, int cap,
                                const std::vector<std::int64_t>& per_dim_max) {
    long double cells = static_cast<long double>(1u << k);
    for (int c = 0; c < d; ++c) {
      cells *= static_cast<long double>(2 * per_dim_max[static_cast<std::size_t>(c)] * cap + 1);
      if (cells > 1e18L) return std::numeric_limits<std::size_t>::max();
    }
    return static_cast<std::size_t>(cells);
  }

 private:
  std::size_t index_of(const std::vector<std::int64_t>& coords, std::uint32_t tor) const {
    std::size_t base = 0;
    for (int c = 0; c < d_; ++c) {
      base += static_cast<std::size_t>(coords[static_cast<std::size_t>(c)] + bounds_[static_cast<std::size_t>(c)]) *
              strides_[static_cast<std::size_t>(c)];
    }
    return base + tor;
  }

  void decode(std::size_t idx, std::vector<std::int64_t>& coords) const {
    for (int c = 0; c < d_; ++c) {
      const std::size_t span = strides_[static_cast<std::size_t>(c)];
      coords[static_cast<std::size_t>(c)] =
          static_cast<std::int64_t>(idx / span) %
              static_cast<std::int64_t>(2 * bounds_[static_cast<std::size_t>(c)] + 1) -
          bounds_[static_cast<std::size_t>(c)];
    }
    (void)k_;
  }

  int d_ = 0;
  int k_ = 0;
  std::size_t tor_span_ = 1;
  std::vector<std::int64_t> bounds_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint8_t> dist_;
};

// ─── Lattice length computation ──────────────────────────────────────────
//
// Exact bounded multiset enumeration, split by generator magnitude: small
// generators are swept exhaustively into a dense table, large ones are
// explored by depth-first multiplicity search pruned against the window.
// Element-graph BFS is unsound here (optimal words pass through huge
// intermediate values); multiset order-independence keeps this exact.
//
// Large generators are walked as {g, -g} pairs with a signed multiplicity:
// a multiset holding both g and -g reduces to a strictly smaller one with
// the same sum, so minima are unaffected by never mixing the two signs.

class LatticeLengths {
 public:
  LatticeLengths(const GroupSpec& spec, const std::vector<GroupElement>& closure, int cap,
                 const std::vector<GroupElement>& targets, const Box& box)
      : spec_(spec), cap_(cap), box_(box) {
    d_ = spec.free_rank;
    k_ = spec.torsion2_rank;
    best_.assign(targets.size(), -1);

    box_radius_ = 0;
    for (int c = 0; c < d_; ++c) {
      const BigInt lo_abs = mp::abs(box.lo[static_cast<std::size_t>(c)]);
      const BigInt hi_abs = mp::abs(box.hi[static_cast<std::size_t>(c)]);
      if (lo_abs > box_radius_) box_radius_ = lo_abs;
      if (hi_abs > box_radius_) box_radius_ = hi_abs;
    }

    // Target coordinates are window-bounded; keep them in int64 form.
    target_coords_.reserve(targets.size());
    target_tor_.reserve(targets.size());
    for (const auto& t : targets) {
      std::vector<std::int64_t> cs(static_cast<std::size_t>(d_));
      for (int c = 0; c < d_; ++c) cs[static_cast<std::size_t>(c)] = to_i64_checked(t.free[static_cast<std::size_t>(c)], "window coordinate");
      target_coords_.push_back(std::move(cs));
      target_tor_.push_back(torsion_bits(t));
    }

    split_generators(closure);
    small_table_.emplace(d_, k_, cap_, small_coords_, small_tor_);

    // Root: the empty big part covers every pure-small multiset.
    sigma_.assign(static_cast<std::size_t>(d_), 0);
    combine(0);
    if (!pairs_.empty()) dfs(0, 0);
  }

  std::vector<int> take_best() { return std::move(best_); }

 private:
  struct BigPair {
    const GroupElement* rep = nullptr;  // canonical representative of {g, -g}
    GroupElement neg;
    BigInt mag;
    std::uint32_t tor = 0;
    bool self_inverse = false;
  };

  void split_generators(const std::vector<GroupElement>& closure) {
    std::vector<std::pair<BigInt, const GroupElement*>> order;
    order.reserve(closure.size());
    for (const auto& g : closure) order.emplace_back(magnitude_inf(g), &g);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return compare_elements(*a.second, *b.second) < 0;
    });

    std::vector<std::int64_t> dim_max(static_cast<std::size_t>(d_), 0);
    std::size_t taken = 0;
    for (; taken < order.size(); ++taken) {
      const GroupElement& g = *order[taken].second;
      if (order[taken].first > kSmallCoordGuard) break;
      auto cand = dim_max;
      for (int c = 0; c < d_; ++c) {
        const std::int64_t v = g.free[static_cast<std::size_t>(c)].convert_to<std::int64_t>();
        cand[static_cast<std::size_t>(c)] = std::max(cand[static_cast<std::size_t>(c)], std::abs(v));
      }
      if (SmallSumTable::cell_count(d_, k_, cap_, cand) > kCellBudget) break;
      dim_max = std::move(cand);
      std::vector<std::int64_t> cs(static_cast<std::size_t>(d_));
      for (int c = 0; c < d_; ++c) cs[static_cast<std::size_t>(c)] = g.free[static_cast<std::size_t>(c)].convert_to<std::int64_t>();
      small_coords_.push_back(std::move(cs));
      small_tor_.push_back(torsion_bits(g));
      theta_ = order[taken].first;
    }

    // The rest are "big": {g, -g} pairs in decreasing magnitude order.
    std::set<GroupElement, ElementLess> seen;
    for (std::size_t i = order.size(); i > taken; --i) {
      const GroupElement& g = *order[i - 1].second;
      if (seen.count(g)) continue;
      GroupElement neg = negate(spec_, g);
      seen.insert(g);
      seen.insert(neg);
      BigPair pair;
      pair.self_inverse = (neg == g);
      // canonical representative keeps the walk deterministic
      if (!pair.self_inverse && compare_elements(neg, g) < 0) {
        pair.rep = order[i - 1].second;  // placeholder; replaced below
        pair.neg = g;
        // find the closure entry for neg to keep a stable pointer
        pair.rep = &*std::lower_bound(closure.begin(), closure.end(), neg, ElementLess{});
      } else {
        pair.rep = order[i - 1].second;
        pair.neg = std::move(neg);
      }
      if (pair.self_inverse) pair.neg = g;
      pair.mag = order[i - 1].first;
      pair.tor = torsion_bits(*pair.rep);
      pairs_.push_back(std::move(pair));
    }
    std::stable_sort(pairs_.begin(), pairs_.end(), [](const BigPair& a, const BigPair& b) {
      if (a.mag != b.mag) return a.mag > b.mag;
      return compare_elements(*a.rep, *b.rep) < 0;
    });
    mags_.reserve(pairs_.size());
    for (const auto& p : pairs_) mags_.push_back(p.mag);
  }

  // Try to finish the current big partial sum with small generators.
  void combine(int used) {
    for (int c = 0; c < d_; ++c) {
      const BigInt b = small_table_->bound(c);
      if (sigma_[static_cast<std::size_t>(c)] < box_.lo[static_cast<std::size_t>(c)] - b ||
          sigma_[static_cast<std::size_t>(c)] > box_.hi[static_cast<std::size_t>(c)] + b) {
        return;
      }
    }
    std::vector<std::int64_t> sig64(static_cast<std::size_t>(d_));
    for (int c = 0; c < d_; ++c) sig64[static_cast<std::size_t>(c)] = sigma_[static_cast<std::size_t>(c)].convert_to<std::int64_t>();
    std::vector<std::int64_t> delta(static_cast<std::size_t>(d_));
    for (std::size_t ti = 0; ti < target_coords_.size(); ++ti) {
      for (int c = 0; c < d_; ++c) {
        delta[static_cast<std::size_t>(c)] = target_coords_[ti][static_cast<std::size_t>(c)] - sig64[static_cast<std::size_t>(c)];
      }
      const std::uint8_t small_len = small_table_->lookup(delta, target_tor_[ti] ^ sigma_tor_);
      if (small_len == kUnreached) continue;
      const int total = used + small_len;
      if (best_[ti] < 0 || total < best_[ti]) best_[ti] = total;
    }
  }

  BigInt sigma_inf() const {
    BigInt m = 0;
    for (const auto& v : sigma_) {
      BigInt a = mp::abs(v);
      if (a > m) m = a;
    }
    return m;
  }

  void add_rep(const BigPair& pair, int sign) {
    const GroupElement& g = (sign > 0) ? *pair.rep : pair.neg;
    for (int c = 0; c < d_; ++c) sigma_[static_cast<std::size_t>(c)] += g.free[static_cast<std::size_t>(c)];
    sigma_tor_ ^= pair.tor;
  }

  void dfs(std::size_t i, int used) {
    const int budget = cap_ - used;
    if (budget == 0) return;

    // Per-node constants: pruning threshold and the completion slack.
    const BigInt dist = box_distance(sigma_, box_);
    // dist > budget * mag  <=>  mag <= floor((dist - 1) / budget)
    const BigInt prune_mag = (dist >= 1) ? BigInt((dist - 1) / budget) : BigInt(-1);
    // Any extension through pair i must satisfy
    //   mag[i] - (budget-1) * max(mag[i+1], theta) <= |sigma| + boxR + cap*theta.
    const BigInt slack = sigma_inf() + box_radius_ + BigInt(cap_) * theta_;

    const bool theta_pruned = prune_mag >= 0 && theta_ <= prune_mag;
    while (i < pairs_.size()) {
      // dist > budget * max(mag[i], theta): nothing from here re-enters the window
      if (theta_pruned && mags_[i] <= prune_mag) return;
      if (budget == 1 && mags_[i] > slack) {
        // jump straight to the first pair small enough to finish the word
        i = static_cast<std::size_t>(
            std::partition_point(mags_.begin() + static_cast<std::ptrdiff_t>(i), mags_.end(),
                                 [&](const BigInt& m) { return m > slack; }) -
            mags_.begin());
        continue;
      }
      const BigInt next_mag = std::max((i + 1 < mags_.size()) ? mags_[i + 1] : BigInt(0), theta_);
      if (mags_[i] - BigInt(budget - 1) * next_mag > slack) {
        ++i;  // no multiplicity of this pair can ever complete
        continue;
      }
      const BigPair& pair = pairs_[i];
      const int signs = pair.self_inverse ? 1 : 2;
      for (int s = 0; s < signs; ++s) {
        const int sign = (s == 0) ? +1 : -1;
        for (int m = 1; m <= budget; ++m) {
          add_rep(pair, sign);
          combine(used + m);
          dfs(i + 1, used + m);
        }
        for (int m = 1; m <= budget; ++m) add_rep(pair, -sign);
      }
      ++i;
    }
  }

  GroupSpec spec_;
  int cap_;
  int d_ = 0, k_ = 0;
  Box box_;
  BigInt box_radius_{0};
  std::vector<std::vector<std::int64_t>> target_coords_;
  std::vector<std::uint32_t> target_tor_;
  std::vector<std::vector<std::int64_t>> small_coords_;
  std::vector<std::uint32_t> small_tor_;
  std::vector<BigPair> pairs_;  // magnitude desc
  std::vector<BigInt> mags_;
  std::optional<SmallSumTable> small_table_;
  BigInt theta_{0};
  std::vector<BigInt> sigma_;
  std::uint32_t sigma_tor_ = 0;
  std::vector<int> best_;
};

// ─── Q+ length computation ───────────────────────────────────────────────

struct RationalKey {
  BigInt num, den;
  bool operator==(const RationalKey&) const = default;
};

struct RationalKeyHash {
  std::size_t operator()(const RationalKey& k) const {
    std::size_t h = mp::hash_value(k.num);
    boost::hash_combine(h, mp::hash_value(k.den));
    return h;
  }
};

unsigned bit_width(const BigInt& v) { return v <= 1 ? 1u : static_cast<unsigned>(mp::msb(v)) + 1u; }

class RationalLengths {
 public:
  RationalLengths(const std::vector<GroupElement>& closure, int cap,
                  const std::vector<GroupElement>& targets) : cap_(cap) {
    best_.assign(targets.size(), -1);
    BigInt max_height = 1;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      Rational q = rational_from_exponents(targets[i].exponents);
      max_height = std::max({max_height, q.num, q.den});
      lookup_.emplace(RationalKey{q.num, q.den}, i);
    }
    height_bits_ = bit_width(max_height);
    for (const auto& g : closure) {
      Rational q = rational_from_exponents(g.exponents);
      gens_.push_back(std::move(q));
    }
    std::stable_sort(gens_.begin(), gens_.end(), [](const Rational& a, const Rational& b) {
      const unsigned ba = std::max(bit_width(a.num), bit_width(a.den));
      const unsigned bb = std::max(bit_width(b.num), bit_width(b.den));
      if (ba != bb) return ba > bb;
      if (a.num != b.num) return a.num < b.num;
      return a.den < b.den;
    });
    dfs(0, Rational{}, 0);
  }

  std::vector<int> take_best() { return std::move(best_); }

 private:
  void visit(const Rational& q, int used) {
    auto it = lookup_.find(RationalKey{q.num, q.den});
    if (it == lookup_.end()) return;
    if (best_[it->second] < 0 || used < best_[it->second]) best_[it->second] = used;
  }

  void dfs(std::size_t i, const Rational& q, int used) {
    if (used == cap_ || i == gens_.size()) return;
    const unsigned qbits = std::max(bit_width(q.num), bit_width(q.den));
    const unsigned gbits = std::max(bit_width(gens_[i].num), bit_width(gens_[i].den));
    if (qbits - 1 > height_bits_ + static_cast<unsigned>(cap_ - used) * gbits) return;
    dfs(i + 1, q, used);
    Rational cur = q;
    for (int m = 1; used + m <= cap_; ++m) {
      cur = rational_mul(cur, gens_[i]);
      visit(cur, used + m);
      dfs(i + 1, cur, used + m);
    }
  }

  int cap_;
  unsigned height_bits_ = 1;
  std::vector<Rational> gens_;
  std::unordered_map<RationalKey, std::size_t, RationalKeyHash> lookup_;
  std::vector<int> best_;
};

std::vector<int> compute_lengths(const GroupSpec& spec, const std::vector<GroupElement>& closure,
                                 int cap, const std::vector<GroupElement>& targets) {
  if (spec.is_lattice()) {
    const Box box = hull_of(targets, spec.free_rank);
    LatticeLengths solver(spec, closure, cap, targets, box);
    return solver.take_best();
  }
  RationalLengths solver(closure, cap, targets);
  auto best = solver.take_best();
  // The empty product covers the identity.
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].exponents.empty()) best[i] = 0;
  }
  return best;
}

}  // namespace

// ─── Closure / strategy ──────────────────────────────────────────────────

std::vector<GroupElement> symmetric_closure(const GroupSpec& spec,
                                            const std::vector<GroupElement>& generators) {
  std::set<GroupElement, ElementLess> closed;
  for (const auto& g : generators) {
    check_shape(spec, g);
    closed.insert(g);
    closed.insert(negate(spec, g));
  }
  return {closed.begin(), closed.end()};
}

void enumerate_multisets(const GroupSpec& spec, const std::vector<GroupElement>& generators,
                         int cap, const EnumerationPruning* pruning, const MultisetVisitor& visit) {
  if (cap < 0) throw DomainError("enumerate_multisets: cap must be nonnegative");
  if (generators.empty()) throw DomainError("enumerate_multisets: generators must be nonempty");
  if (pruning && !spec.is_lattice()) {
    throw DomainError("enumerate_multisets: pruning boxes apply to lattice specs only");
  }
  const auto closure = symmetric_closure(spec, generators);

  // Decreasing magnitude keeps the prune bound sound: generators beyond the
  // current index can move each coordinate by at most the current magnitude.
  std::vector<std::pair<BigInt, const GroupElement*>> order;
  for (const auto& g : closure) {
    order.emplace_back(spec.is_lattice() ? magnitude_inf(g) : BigInt(0), &g);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return compare_elements(*a.second, *b.second) < 0;
  });

  Box box;
  if (pruning) {
    box.lo = pruning->lo;
    box.hi = pruning->hi;
    if (box.lo.size() != static_cast<std::size_t>(spec.free_rank) || box.hi.size() != box.lo.size()) {
      throw DomainError("enumerate_multisets: pruning box rank mismatch");
    }
  }

  std::vector<std::size_t> indices;
  GroupElement sum = identity_element(spec);
  std::vector<BigInt> sigma(static_cast<std::size_t>(spec.free_rank), 0);

  std::function<void(std::size_t, int, int)> walk = [&](std::size_t i, int used, int size) {
    if (used == size) {
      // Report indices in the caller-visible closure order.
      visit(indices, sum);
      return;
    }
    if (i == order.size()) return;
    if (pruning) {
      const BigInt reach = std::max(order[i].first, pruning->extra_step_magnitude);
      if (box_distance(sigma, box) > BigInt(size - used) * reach) return;
    }
    walk(i + 1, used, size);
    const GroupElement& g = *order[i].second;
    const std::size_t closure_index = static_cast<std::size_t>(
        std::lower_bound(closure.begin(), closure.end(), g, ElementLess{}) - closure.begin());
    for (int m = 1; used + m <= size; ++m) {
      sum = add(spec, sum, g);
      for (int c = 0; c < spec.free_rank; ++c) sigma[static_cast<std::size_t>(c)] = sum.free[static_cast<std::size_t>(c)];
      indices.push_back(closure_index);
      walk(i + 1, used + m, size);
    }
    for (int m = 1; used + m <= size; ++m) {
      sum = add(spec, sum, negate(spec, g));
      indices.pop_back();
    }
    for (int c = 0; c < spec.free_rank; ++c) sigma[static_cast<std::size_t>(c)] = sum.free[static_cast<std::size_t>(c)];
  };

  for (int size = 0; size <= cap; ++size) walk(0, 0, size);
}

// ─── Tables ──────────────────────────────────────────────────────────────

bool same_entries(const LengthTable& a, const LengthTable& b) {
  return a.window_bound == b.window_bound && a.cap == b.cap && a.entries == b.entries;
}

std::optional<int> table_lookup(const LengthTable& table, const GroupElement& x) {
  auto it = std::lower_bound(table.entries.begin(), table.entries.end(), x,
                             [](const auto& entry, const GroupElement& key) {
                               return compare_elements(entry.first, key) < 0;
                             });
  if (it == table.entries.end() || !(it->first == x)) {
    throw DomainError("table_lookup: element outside the table window");
  }
  return it->second;
}

nlohmann::ordered_json table_to_json(const GroupSpec& spec, const LengthTable& table) {
  nlohmann::ordered_json j;
  j["window"] = table.window_bound;
  j["cap"] = table.cap;
  j["K"] = table.truncation;
  j["certified"] = table.certified;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& [elem, len] : table.entries) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    row.push_back(element_to_json(spec, elem));
    if (len.has_value()) {
      row.push_back(*len);
    } else {
      row.push_back("inf-cap");
    }
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j;
}

LengthTable table_from_json(const GroupSpec& spec, const nlohmann::json& j) {
  LengthTable table;
  table.window_bound = j.at("window").get<std::int64_t>();
  table.cap = j.at("cap").get<int>();
  table.truncation = j.at("K").get<std::size_t>();
  table.certified = j.at("certified").get<bool>();
  for (const auto& row : j.at("entries")) {
    GroupElement elem = element_from_json(spec, row.at(0));
    std::optional<int> len;
    if (row.at(1).is_number_integer()) {
      len = row.at(1).get<int>();
    } else if (!(row.at(1).is_string() && row.at(1).get<std::string>() == "inf-cap")) {
      throw DomainError("table: length must be an integer or \"inf-cap\"");
    }
    table.entries.emplace_back(std::move(elem), len);
  }
  return table;
}

std::string table_to_csv(const GroupSpec& spec, const LengthTable& table) {
  std::string out = "# window=" + std::to_string(table.window_bound) + " cap=" + std::to_string(table.cap) +
                    " K=" + std::to_string(table.truncation) +
                    (table.certified ? " certified" : " uncertified") + "\n";
  out += "element,length\n";
  for (const auto& [elem, len] : table.entries) {
    out += element_to_text(spec, elem);
    out += ",";
    out += len.has_value() ? std::to_string(*len) : std::string("inf-cap");
    out += "\n";
  }
  return out;
}

// ─── Engine entry points ─────────────────────────────────────────────────

namespace {

LengthTable table_for_targets(const GeneratorFamily& family, std::vector<GroupElement> targets,
                              std::int64_t window_bound, int cap, std::size_t truncation) {
  if (cap < 1) throw DomainError("cap must be positive");
  if (cap > 200) throw DomainError("cap above 200 is not supported");
  if (truncation < 1) throw DomainError("truncation index must be positive");
  const auto members = first_members(family, truncation);
  const auto closure = symmetric_closure(family.spec, members);
  const auto best = compute_lengths(family.spec, closure, cap, targets);
  LengthTable table;
  table.window_bound = window_bound;
  table.cap = cap;
  table.truncation = members.size();
  table.certified = false;
  table.entries.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    table.entries.emplace_back(std::move(targets[i]),
                               best[i] >= 0 && best[i] <= cap ? std::optional<int>(best[i]) : std::nullopt);
  }
  return table;
}

}  // namespace

std::optional<int> word_length(const GeneratorFamily& family, const GroupElement& x, int cap,
                               std::size_t truncation) {
  check_shape(family.spec, x);
  BigInt bound = family.spec.is_lattice() ? magnitude_inf(x) : BigInt(1);
  if (!family.spec.is_lattice()) {
    Rational q = rational_from_exponents(x.exponents);
    bound = std::max(q.num, q.den);
  }
  if (bound < 1) bound = 1;
  // The bound only stamps the throwaway single-target table.
  const std::int64_t stamp =
      fits_i64(bound) ? bound.convert_to<std::int64_t>() : std::numeric_limits<std::int64_t>::max();
  auto table = table_for_targets(family, {x}, stamp, cap, truncation);
  return table.entries.front().second;
}

LengthTable build_length_table(const GeneratorFamily& family, const ObservationWindow& window,
                               int cap, std::size_t truncation) {
  return table_for_targets(family, enumerate_window(family.spec, window), window.bound, cap, truncation);
}

std::vector<GroupElement> sphere(const GeneratorFamily& family, int r, const ObservationWindow& window,
                                 std::size_t truncation) {
  if (r < 0) throw DomainError("sphere: radius must be nonnegative");
  if (r == 0) return {identity_element(family.spec)};
  const auto table = build_length_table(family, window, r, truncation);
  std::vector<GroupElement> out;
  for (const auto& [elem, len] : table.entries) {
    if (len.has_value() && *len == r) out.push_back(elem);
  }
  return out;
}

GrowthCount growth_count(const GeneratorFamily& family, int r, const ObservationWindow& window,
                         std::size_t truncation) {
  return GrowthCount{static_cast<std::int64_t>(sphere(family, r, window, truncation).size()), window};
}

CertifiedTable stabilize_table(const GeneratorFamily& family, const ObservationWindow& window,
                               int cap, const StabilizeOptions& opts) {
  std::size_t hint = opts.hint_override.value_or(truncation_hint(family, window.bound, cap));
  if (hint < 1) hint = 1;
  if (opts.max_levels < 3) throw DomainError("stabilize: max_levels must allow at least three levels");

  StabilizationCertificate cert;
  std::vector<LengthTable> tables;
  std::vector<std::size_t> ks;
  for (std::size_t level = 1; level <= opts.max_levels; ++level) {
    const std::size_t k = hint * level;
    cert.levels.push_back(k);
    tables.push_back(build_length_table(family, window, cap, k));
    ks.push_back(k);
    const std::size_t n = tables.size();
    if (n >= 3 && same_entries(tables[n - 3], tables[n - 2]) && same_entries(tables[n - 2], tables[n - 1])) {
      cert.agreeing = {ks[n - 3], ks[n - 2], ks[n - 1]};
      LengthTable result = std::move(tables[n - 3]);
      result.certified = true;
      return CertifiedTable{std::move(result), std::move(cert)};
    }
    // Keep at most the last three tables.
    if (tables.size() > 3) {
      tables.erase(tables.begin());
      ks.erase(ks.begin());
    }
  }

  std::vector<DivergentEntry> divergent;
  const LengthTable& a = tables[tables.size() - 2];
  const LengthTable& b = tables.back();
  auto render = [](const std::optional<int>& v) {
    return v.has_value() ? std::to_string(*v) : std::string("inf-cap");
  };
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].second != b.entries[i].second) {
      divergent.push_back(DivergentEntry{element_to_text(family.spec, a.entries[i].first),
                                         render(a.entries[i].second), render(b.entries[i].second),
                                         ks[ks.size() - 2], ks.back()});
    }
  }
  throw StabilizationFailure("table did not stabilize within K ceiling " +
                                 std::to_string(hint * opts.max_levels) + " (hint " + std::to_string(hint) + ")",
                             std::move(divergent));
}

}  // namespace phaseforge
