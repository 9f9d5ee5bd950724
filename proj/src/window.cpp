#include "phaseforge/window.hpp"

#include "phaseforge/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>

namespace phaseforge {

namespace mp = boost::multiprecision;

std::vector<GroupElement> enumerate_window(const GroupSpec& spec, const ObservationWindow& window) {
  if (window.bound < 1) throw DomainError("window bound must be positive");
  std::vector<GroupElement> out;
  const std::int64_t n = window.bound;
  if (spec.is_lattice()) {
    const int d = spec.free_rank;
    const int k = spec.torsion2_rank;
    GroupElement cur = identity_element(spec);
    std::vector<std::int64_t> coords(static_cast<std::size_t>(d), -n);
    const std::uint32_t tor_count = 1u << k;
    while (true) {
      for (int i = 0; i < d; ++i) cur.free[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)];
      for (std::uint32_t bits = 0; bits < tor_count; ++bits) {
        for (int i = 0; i < k; ++i) {
          cur.torsion[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((bits >> (k - 1 - i)) & 1u);
        }
        out.push_back(cur);
      }
      int pos = d - 1;
      while (pos >= 0 && coords[static_cast<std::size_t>(pos)] == n) {
        coords[static_cast<std::size_t>(pos)] = -n;
        --pos;
      }
      if (pos < 0) break;
      ++coords[static_cast<std::size_t>(pos)];
    }
  } else {
    for (std::int64_t den = 1; den <= n; ++den) {
      for (std::int64_t num = 1; num <= n; ++num) {
        if (std::gcd(num, den) != 1) continue;
        GroupElement x;
        x.exponents = exponents_from_rational(Rational{BigInt(num), BigInt(den)});
        out.push_back(std::move(x));
      }
    }
  }
  std::sort(out.begin(), out.end(), ElementLess{});
  return out;
}

bool window_contains(const GroupSpec& spec, const ObservationWindow& window, const GroupElement& x) {
  check_shape(spec, x);
  if (spec.is_lattice()) {
    const BigInt n = window.bound;
    for (const auto& v : x.free) {
      if (mp::abs(v) > n) return false;
    }
    return true;
  }
  Rational q = rational_from_exponents(x.exponents);
  return q.num <= window.bound && q.den <= window.bound;
}

}  // namespace phaseforge
