#include "phaseforge/group.hpp"

#include "phaseforge/errors.hpp"

#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace phaseforge {

namespace mp = boost::multiprecision;

BigInt big_from_decimal(const std::string& text) {
  if (text.empty()) throw DomainError("integer literal is empty");
  std::size_t start = (text[0] == '-') ? 1 : 0;
  if (start == text.size()) throw DomainError("integer literal '" + text + "' has no digits");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw DomainError("integer literal '" + text + "' is not a decimal integer");
    }
  }
  return BigInt(text);
}

std::string big_to_decimal(const BigInt& v) { return v.str(); }

bool fits_i64(const BigInt& v) {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  return v >= lo && v <= hi;
}

std::int64_t to_i64_checked(const BigInt& v, const char* what) {
  if (!fits_i64(v)) throw DomainError(std::string(what) + " out of 64-bit range: " + v.str());
  return v.convert_to<std::int64_t>();
}

// ─── Specs ───────────────────────────────────────────────────────────────

GroupSpec GroupSpec::lattice(int d, int k) {
  if (d < 0 || k < 0 || d + k < 1) {
    throw DomainError("lattice spec requires d >= 0, k >= 0, d + k >= 1");
  }
  if (d > 64 || k > 20) {
    throw DomainError("lattice spec exceeds supported ranks (d <= 64, k <= 20)");
  }
  GroupSpec s;
  s.kind = Kind::Lattice;
  s.free_rank = d;
  s.torsion2_rank = k;
  return s;
}

GroupSpec GroupSpec::positive_rationals() {
  GroupSpec s;
  s.kind = Kind::PositiveRationals;
  return s;
}

nlohmann::ordered_json spec_to_json(const GroupSpec& spec) {
  nlohmann::ordered_json j;
  if (spec.is_lattice()) {
    j["kind"] = "lattice";
    j["d"] = spec.free_rank;
    j["k"] = spec.torsion2_rank;
  } else {
    j["kind"] = "positive_rationals";
  }
  return j;
}

GroupSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw DomainError("spec: missing \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lattice") {
    if (!j.contains("d") || !j.contains("k")) throw DomainError("spec: lattice requires \"d\" and \"k\"");
    return GroupSpec::lattice(j.at("d").get<int>(), j.at("k").get<int>());
  }
  if (kind == "positive_rationals") return GroupSpec::positive_rationals();
  throw DomainError("spec: unknown kind '" + kind + "'");
}

// ─── Elements ────────────────────────────────────────────────────────────

GroupElement identity_element(const GroupSpec& spec) {
  GroupElement e;
  if (spec.is_lattice()) {
    e.free.assign(static_cast<std::size_t>(spec.free_rank), BigInt(0));
    e.torsion.assign(static_cast<std::size_t>(spec.torsion2_rank), 0);
  }
  return e;
}

bool is_identity(const GroupSpec& spec, const GroupElement& x) {
  return x == identity_element(spec);
}

void check_shape(const GroupSpec& spec, const GroupElement& x) {
  if (spec.is_lattice()) {
    if (!x.exponents.empty()) throw ShapeError("lattice element carries prime exponents");
    if (x.free.size() != static_cast<std::size_t>(spec.free_rank)) {
      throw ShapeError("element has " + std::to_string(x.free.size()) + " free coordinates, spec wants " +
                       std::to_string(spec.free_rank));
    }
    if (x.torsion.size() != static_cast<std::size_t>(spec.torsion2_rank)) {
      throw ShapeError("element has " + std::to_string(x.torsion.size()) + " torsion bits, spec wants " +
                       std::to_string(spec.torsion2_rank));
    }
    for (auto b : x.torsion) {
      if (b > 1) throw ShapeError("torsion bit out of {0,1}");
    }
  } else {
    if (!x.free.empty() || !x.torsion.empty()) throw ShapeError("Q+ element carries lattice coordinates");
    for (const auto& [p, e] : x.exponents) {
      if (e == 0) throw ShapeError("Q+ exponent map stores a zero exponent");
      if (p < 2) throw ShapeError("Q+ exponent map key " + p.str() + " is not a prime");
    }
  }
}

GroupElement add(const GroupSpec& spec, const GroupElement& x, const GroupElement& y) {
  check_shape(spec, x);
  check_shape(spec, y);
  GroupElement out;
  if (spec.is_lattice()) {
    out.free.resize(x.free.size());
    for (std::size_t i = 0; i < x.free.size(); ++i) out.free[i] = x.free[i] + y.free[i];
    out.torsion.resize(x.torsion.size());
    for (std::size_t i = 0; i < x.torsion.size(); ++i) {
      out.torsion[i] = static_cast<std::uint8_t>(x.torsion[i] ^ y.torsion[i]);
    }
  } else {
    out.exponents = x.exponents;
    for (const auto& [p, e] : y.exponents) {
      auto it = out.exponents.find(p);
      if (it == out.exponents.end()) {
        out.exponents.emplace(p, e);
      } else {
        it->second += e;
        if (it->second == 0) out.exponents.erase(it);
      }
    }
  }
  return out;
}

GroupElement negate(const GroupSpec& spec, const GroupElement& x) {
  check_shape(spec, x);
  GroupElement out = x;
  for (auto& v : out.free) v = -v;
  for (auto& [p, e] : out.exponents) e = -e;
  return out;
}

GroupSpec product_spec(const GroupSpec& s1, const GroupSpec& s2) {
  if (!s1.is_lattice() || !s2.is_lattice()) {
    throw DomainError("direct products are supported for lattice specs only");
  }
  return GroupSpec::lattice(s1.free_rank + s2.free_rank, s1.torsion2_rank + s2.torsion2_rank);
}

GroupElement product_element(const GroupSpec& s1, const GroupSpec& s2,
                             const GroupElement& x, const GroupElement& y) {
  product_spec(s1, s2);  // validates specs
  check_shape(s1, x);
  check_shape(s2, y);
  GroupElement out;
  out.free = x.free;
  out.free.insert(out.free.end(), y.free.begin(), y.free.end());
  out.torsion = x.torsion;
  out.torsion.insert(out.torsion.end(), y.torsion.begin(), y.torsion.end());
  return out;
}

GroupElement project_left(const GroupSpec& s1, const GroupSpec& s2, const GroupElement& xy) {
  check_shape(product_spec(s1, s2), xy);
  GroupElement out;
  out.free.assign(xy.free.begin(), xy.free.begin() + s1.free_rank);
  out.torsion.assign(xy.torsion.begin(), xy.torsion.begin() + s1.torsion2_rank);
  return out;
}

GroupElement project_right(const GroupSpec& s1, const GroupSpec& s2, const GroupElement& xy) {
  check_shape(product_spec(s1, s2), xy);
  GroupElement out;
  out.free.assign(xy.free.begin() + s1.free_rank, xy.free.end());
  out.torsion.assign(xy.torsion.begin() + s1.torsion2_rank, xy.torsion.end());
  return out;
}

int compare_elements(const GroupElement& a, const GroupElement& b) {
  if (a.free.size() != b.free.size()) return a.free.size() < b.free.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.free.size(); ++i) {
    if (a.free[i] != b.free[i]) return a.free[i] < b.free[i] ? -1 : 1;
  }
  if (a.torsion.size() != b.torsion.size()) return a.torsion.size() < b.torsion.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.torsion.size(); ++i) {
    if (a.torsion[i] != b.torsion[i]) return a.torsion[i] < b.torsion[i] ? -1 : 1;
  }
  auto ia = a.exponents.begin();
  auto ib = b.exponents.begin();
  for (; ia != a.exponents.end() && ib != b.exponents.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
  }
  if (ia != a.exponents.end()) return 1;
  if (ib != b.exponents.end()) return -1;
  return 0;
}

std::size_t element_hash(const GroupElement& x) {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& v : x.free) boost::hash_combine(h, mp::hash_value(v));
  for (auto b : x.torsion) boost::hash_combine(h, static_cast<std::size_t>(b));
  for (const auto& [p, e] : x.exponents) {
    boost::hash_combine(h, mp::hash_value(p));
    boost::hash_combine(h, mp::hash_value(e));
  }
  return h;
}

BigInt magnitude_inf(const GroupElement& x) {
  BigInt m = 0;
  for (const auto& v : x.free) {
    BigInt a = mp::abs(v);
    if (a > m) m = a;
  }
  return m;
}

// ─── JSON / text ─────────────────────────────────────────────────────────

nlohmann::ordered_json element_to_json(const GroupSpec& spec, const GroupElement& x) {
  check_shape(spec, x);
  nlohmann::ordered_json j;
  if (spec.is_lattice()) {
    auto frees = nlohmann::ordered_json::array();
    for (const auto& v : x.free) frees.push_back(big_to_decimal(v));
    auto tors = nlohmann::ordered_json::array();
    for (auto b : x.torsion) tors.push_back(static_cast<int>(b));
    j["free"] = std::move(frees);
    j["tor"] = std::move(tors);
  } else {
    auto primes = nlohmann::ordered_json::object();
    for (const auto& [p, e] : x.exponents) primes[big_to_decimal(p)] = big_to_decimal(e);
    j["primes"] = std::move(primes);
  }
  return j;
}

GroupElement element_from_json(const GroupSpec& spec, const nlohmann::json& j) {
  GroupElement x;
  if (spec.is_lattice()) {
    if (!j.contains("free") || !j.contains("tor")) throw DomainError("element: lattice form requires \"free\" and \"tor\"");
    for (const auto& v : j.at("free")) x.free.push_back(big_from_decimal(v.get<std::string>()));
    for (const auto& b : j.at("tor")) {
      int bit = b.get<int>();
      if (bit != 0 && bit != 1) throw DomainError("element: torsion bit must be 0 or 1");
      x.torsion.push_back(static_cast<std::uint8_t>(bit));
    }
  } else {
    if (!j.contains("primes")) throw DomainError("element: Q+ form requires \"primes\"");
    for (const auto& [key, val] : j.at("primes").items()) {
      BigInt p = big_from_decimal(key);
      BigInt e = big_from_decimal(val.get<std::string>());
      if (e == 0) throw DomainError("element: zero exponent for prime " + key);
      x.exponents.emplace(std::move(p), std::move(e));
    }
  }
  check_shape(spec, x);
  return x;
}

std::string element_to_text(const GroupSpec& spec, const GroupElement& x) {
  check_shape(spec, x);
  if (!spec.is_lattice()) {
    Rational q = rational_from_exponents(x.exponents);
    return q.num.str() + "/" + q.den.str();
  }
  std::string out;
  for (std::size_t i = 0; i < x.free.size(); ++i) {
    if (i) out += ":";
    out += x.free[i].str();
  }
  if (!x.torsion.empty()) {
    out += "#";
    for (auto b : x.torsion) out += static_cast<char>('0' + b);
  }
  return out;
}

// ─── Q+ helpers ──────────────────────────────────────────────────────────

Rational rational_from_exponents(const std::map<BigInt, BigInt>& exps) {
  Rational q;
  for (const auto& [p, e] : exps) {
    if (e == 0) continue;
    unsigned exp = mp::abs(e).convert_to<unsigned>();
    BigInt power = mp::pow(p, exp);
    if (e > 0) {
      q.num *= power;
    } else {
      q.den *= power;
    }
  }
  return q;
}

std::map<BigInt, BigInt> exponents_from_rational(const Rational& q) {
  std::map<BigInt, BigInt> exps;
  auto absorb = [&exps](BigInt v, int sign) {
    std::uint64_t n = to_i64_checked(v, "rational factorization input");
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
      while (n % p == 0) {
        exps[BigInt(p)] += sign;
        n /= p;
      }
    }
    if (n > 1) exps[BigInt(n)] += sign;
  };
  if (q.num <= 0 || q.den <= 0) throw DomainError("rational must be positive");
  absorb(q.num, 1);
  absorb(q.den, -1);
  for (auto it = exps.begin(); it != exps.end();) {
    it = (it->second == 0) ? exps.erase(it) : std::next(it);
  }
  return exps;
}

Rational rational_mul(const Rational& a, const Rational& b) {
  BigInt g1 = mp::gcd(a.num, b.den);
  BigInt g2 = mp::gcd(b.num, a.den);
  Rational out;
  out.num = (a.num / g1) * (b.num / g2);
  out.den = (a.den / g2) * (b.den / g1);
  return out;
}

Rational rational_inv(const Rational& a) { return Rational{a.den, a.num}; }

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t p = 3; p * p <= n; p += 2) {
    if (n % p == 0) return false;
  }
  return true;
}

std::uint64_t nth_prime(std::size_t index0) {
  std::uint64_t candidate = 2;
  std::size_t seen = 0;
  while (true) {
    if (is_prime_u64(candidate)) {
      if (seen == index0) return candidate;
      ++seen;
    }
    ++candidate;
  }
}

}  // namespace phaseforge
