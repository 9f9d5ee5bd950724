#include "phaseforge/suites.hpp"

#include "phaseforge/analyzer.hpp"
#include "phaseforge/engine.hpp"
#include "phaseforge/errors.hpp"
#include "phaseforge/family.hpp"
#include "phaseforge/oracle.hpp"
#include "phaseforge/window.hpp"

#include "json.hpp"

#include <algorithm>
#include <set>

namespace phaseforge {

namespace {

// Deterministic across platforms (std::uniform_int_distribution is not).
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::int64_t pick(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

std::vector<std::int64_t> random_w(SplitMix64& rng, int max_size, std::int64_t max_value) {
  const int size = static_cast<int>(rng.pick(1, max_size));
  std::set<std::int64_t> w;
  while (static_cast<int>(w.size()) < size) w.insert(rng.pick(1, max_value));
  return {w.begin(), w.end()};
}

std::string w_text(const std::vector<std::int64_t>& W) {
  std::string out = "{";
  for (std::size_t i = 0; i < W.size(); ++i) out += (i ? "," : "") + std::to_string(W[i]);
  return out + "}";
}

SuiteCase verify_case(const std::string& name, const GeneratorFamily& family,
                      const Expectation& expected, const std::vector<std::int64_t>& windows, int cap) {
  SuiteCase c;
  c.name = name;
  try {
    const auto report = verify_construction(family, expected, windows, cap);
    c.pass = report.pass;
    if (report.pass) {
      c.detail = "transition (" + std::to_string(report.detected.r) + ", " +
                 (report.detected.finite ? std::to_string(report.detected.s) : std::string("window-growing")) +
                 ") verified on " + std::to_string(windows.size()) + " windows";
    } else {
      c.detail = report.mismatches.front() +
                 (report.mismatches.size() > 1
                      ? " (+" + std::to_string(report.mismatches.size() - 1) + " more)"
                      : "");
    }
  } catch (const Error& e) {
    c.pass = false;
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

// Exact S_A(r) = W u (-W) check against two certified tables.
SuiteCase zphases_case(int r, const std::vector<std::int64_t>& W) {
  SuiteCase c;
  c.name = "r=" + std::to_string(r) + " W=" + w_text(W);
  try {
    const auto family = (r == 2) ? make_naturals_except(W) : make_nathanson(r, W);
    const std::int64_t mw = W.back();
    std::size_t checked = 0;
    for (const std::int64_t n : {mw + 5, 2 * mw + 10}) {
      const auto cert = stabilize_table(family, ObservationWindow{n}, r);
      for (const auto& [elem, len] : cert.table.entries) {
        const std::int64_t v = elem.free[0].convert_to<std::int64_t>();
        const bool in_w = std::binary_search(W.begin(), W.end(), std::abs(v)) && v != 0;
        if (!len.has_value()) {
          c.detail = "window " + std::to_string(n) + ": " + std::to_string(v) + " exceeds cap " + std::to_string(r);
          return c;
        }
        if (in_w && *len != r) {
          c.detail = "window " + std::to_string(n) + ": length of " + std::to_string(v) + " is " +
                     std::to_string(*len) + ", want " + std::to_string(r);
          return c;
        }
        if (!in_w && *len > r - 1) {
          c.detail = "window " + std::to_string(n) + ": length of " + std::to_string(v) + " is " +
                     std::to_string(*len) + ", want <= " + std::to_string(r - 1);
          return c;
        }
        ++checked;
      }
    }
    c.pass = true;
    c.detail = std::to_string(checked) + " window entries match S_A(" + std::to_string(r) + ") = W u (-W)";
  } catch (const Error& e) {
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

SuiteReport suite_zphases() {
  SuiteReport report;
  report.suite = "zphases";
  {
    SplitMix64 rng(0x5eedf00d2026ULL);
    for (int i = 0; i < 10; ++i) {
      const auto W = random_w(rng, 3, 12);
      const auto family = make_naturals_except(W);
      const std::int64_t mw = W.back();
      Expectation expect;
      expect.r = 2;
      expect.s = 2 * static_cast<std::int64_t>(W.size());
      expect.rule = SetRule::w_symmetric(W);
      report.cases.push_back(verify_case("r=2 W=" + w_text(W), family, expect,
                                         {mw + 4, mw + 8, mw + 12}, 3));
    }
  }
  {
    SplitMix64 rng(0x00ddba11c0deULL);
    for (int r : {3, 4, 5}) {
      for (int i = 0; i < 5; ++i) {
        report.cases.push_back(zphases_case(r, random_w(rng, 3, 8)));
      }
    }
  }
  return report;
}

SuiteReport suite_lemma2s() {
  SuiteReport report;
  report.suite = "lemma2s";
  for (std::int64_t s : {1, 3, 5, 7}) {
    const std::int64_t t = lemma_t(s);
    Expectation expect;
    expect.r = 2;
    expect.s = s;
    expect.rule = SetRule::torsion_ball(t);
    report.cases.push_back(verify_case("s=" + std::to_string(s), make_lemma2s(s), expect,
                                       {t + 2, t + 4, t + 6}, 3));
  }
  return report;
}

SuiteReport suite_lemma3s() {
  SuiteReport report;
  report.suite = "lemma3s";
  for (std::int64_t s : {1, 3, 5, 7}) {
    const std::int64_t t = lemma_t(s);
    Expectation expect;
    expect.r = 3;
    expect.s = s;
    expect.rule = SetRule::torsion_ball(t);
    report.cases.push_back(verify_case("s=" + std::to_string(s), make_lemma3s(s), expect,
                                       {t + 2, t + 4, t + 6}, 4));
  }
  return report;
}

SuiteReport suite_oddphase() {
  SuiteReport report;
  report.suite = "oddphase";
  const GroupSpec zz2 = GroupSpec::lattice(1, 1);
  for (int r : {2, 3, 4, 5}) {
    for (std::int64_t s : {1, 3}) {
      const std::int64_t t = lemma_t(s);
      const auto family = build_odd_phase(r, s);
      Expectation expect;
      expect.r = r;
      expect.s = s;
      if (r <= 3) {
        expect.rule = SetRule::torsion_ball(t);
      } else {
        expect.rule = SetRule::product_pair(zz2, SetRule::torsion_ball(t), zz2, SetRule::torsion_ball(1));
      }
      const std::vector<std::int64_t> windows =
          (r <= 3) ? std::vector<std::int64_t>{t + 2, t + 4, t + 6} : std::vector<std::int64_t>{2, 3, 4};
      report.cases.push_back(verify_case("r=" + std::to_string(r) + " s=" + std::to_string(s), family,
                                         expect, windows, r + 1));
    }
  }
  return report;
}

SuiteCase convolution_case(const GeneratorFamily& f1, const GeneratorFamily& f2,
                           const std::string& name, std::int64_t window_bound, int cap) {
  SuiteCase c;
  c.name = name;
  try {
    const auto product = product_sum(f1, f2);
    const auto t1 = stabilize_table(f1, ObservationWindow{window_bound}, cap);
    const auto t2 = stabilize_table(f2, ObservationWindow{window_bound}, cap);
    const auto tp = stabilize_table(product, ObservationWindow{window_bound}, cap);
    auto counts = [cap](const LengthTable& table) {
      std::vector<std::int64_t> out(static_cast<std::size_t>(cap) + 1, 0);
      for (const auto& [elem, len] : table.entries) {
        if (len.has_value()) ++out[static_cast<std::size_t>(*len)];
      }
      return out;
    };
    const auto c1 = counts(t1.table);
    const auto c2 = counts(t2.table);
    const auto cp = counts(tp.table);
    for (int radius = 0; radius <= cap; ++radius) {
      std::int64_t expect = 0;
      for (int q = 0; q <= radius; ++q) {
        expect += c1[static_cast<std::size_t>(q)] * c2[static_cast<std::size_t>(radius - q)];
      }
      if (cp[static_cast<std::size_t>(radius)] != expect) {
        c.detail = "radius " + std::to_string(radius) + ": product count " +
                   std::to_string(cp[static_cast<std::size_t>(radius)]) + " != convolution " +
                   std::to_string(expect);
        return c;
      }
    }
    c.pass = true;
    c.detail = "L(r) matches the component convolution for all r <= " + std::to_string(cap) +
               " at window " + std::to_string(window_bound);
  } catch (const Error& e) {
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

SuiteReport suite_products() {
  SuiteReport report;
  report.suite = "products";
  const GroupSpec z = GroupSpec::lattice(1, 0);
  const GroupSpec zz2 = GroupSpec::lattice(1, 1);

  const auto ne2 = make_naturals_except({2});
  const auto ne3 = make_naturals_except({3});
  {
    Expectation expect;
    expect.r = 4;
    expect.s = 4;
    expect.rule = SetRule::product_pair(z, SetRule::w_symmetric({2}), z, SetRule::w_symmetric({3}));
    report.cases.push_back(verify_case("product_sum(N\\{2}, N\\{3})", product_sum(ne2, ne3), expect,
                                       {5, 7, 9}, 5));
  }
  {
    Expectation expect;
    expect.r = 4;
    expect.s = 3;
    expect.rule = SetRule::product_pair(zz2, SetRule::torsion_ball(1), zz2, SetRule::torsion_ball(2));
    report.cases.push_back(verify_case("product_sum(A_1, A_3)", product_sum(make_lemma2s(1), make_lemma2s(3)),
                                       expect, {3, 4, 5}, 5));
  }
  {
    Expectation expect;
    expect.r = 2;
    expect.s = std::nullopt;  // window-growing
    expect.rule = SetRule::max_union(z, SetRule::w_symmetric({2}), z, SetRule::w_symmetric({3}));
    report.cases.push_back(verify_case("product_max(N\\{2}, N\\{3})", product_max(ne2, ne3), expect,
                                       {5, 7, 9}, 3));
  }
  for (std::int64_t n : {4, 6}) {
    report.cases.push_back(convolution_case(ne2, ne3, "convolution N\\{2} x N\\{3} window " + std::to_string(n),
                                            n, 4));
    report.cases.push_back(convolution_case(make_lemma2s(1), make_lemma2s(3),
                                            "convolution A_1 x A_3 window " + std::to_string(n), n, 4));
  }
  return report;
}

SuiteCase one_union_case(std::int64_t m) {
  SuiteCase c;
  c.name = "one_union_multiples m=" + std::to_string(m);
  try {
    const auto family = make_one_union_multiples(m);
    const int bound = static_cast<int>(m / 2) + 1;
    const int cap = bound + 1;
    const std::vector<std::int64_t> windows{3 * m, 4 * m, 5 * m};
    const auto rows = growth_profile(family, windows, cap);
    for (const auto& row : rows) {
      if (row.radius == 0) continue;
      if (row.radius <= bound && row.cls != RadiusClass::WindowGrowing) {
        c.detail = "radius " + std::to_string(row.radius) + " is " + radius_class_name(row.cls) +
                   ", want window-growing";
        return c;
      }
      if (row.radius > bound && row.count != 0) {
        c.detail = "radius " + std::to_string(row.radius) + " has count " + std::to_string(row.count) +
                   " at window " + std::to_string(row.window) + ", want 0";
        return c;
      }
    }
    c.pass = true;
    c.detail = "maximum certified length is " + std::to_string(bound) +
               " and every radius up to it is window-growing";
  } catch (const Error& e) {
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

SuiteCase primes_closed_form_case() {
  SuiteCase c;
  c.name = "primes closed form vs oracle (height <= 50, cap 6)";
  try {
    const auto family = make_primes();
    const int cap = 6;
    const auto members = first_members(family, truncation_hint(family, 50, cap));
    OracleTable oracle(family.spec, members, cap);
    std::size_t checked = 0;
    for (const auto& x : enumerate_window(family.spec, ObservationWindow{50})) {
      const auto cf = closed_form_length(family, x);
      const auto ol = oracle.length(x);
      const bool match = (*cf <= cap) ? (ol.has_value() && *ol == *cf) : !ol.has_value();
      if (!match) {
        c.detail = element_to_text(family.spec, x) + ": closed form " + std::to_string(*cf) +
                   ", oracle " + (ol.has_value() ? std::to_string(*ol) : std::string("inf-cap"));
        return c;
      }
      ++checked;
    }
    c.pass = true;
    c.detail = std::to_string(checked) + " rationals agree";
  } catch (const Error& e) {
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

SuiteCase axes_closed_form_case(int r) {
  SuiteCase c;
  c.name = "coordinate_axes r=" + std::to_string(r) + " closed form vs oracle (window 4)";
  try {
    const auto family = make_coordinate_axes(r);
    const int cap = r + 1;
    const auto members = first_members(family, truncation_hint(family, 4, cap));
    OracleTable oracle(family.spec, members, cap);
    std::size_t checked = 0;
    for (const auto& x : enumerate_window(family.spec, ObservationWindow{4})) {
      const auto cf = closed_form_length(family, x);
      const auto ol = oracle.length(x);
      if (!ol.has_value() || *ol != *cf) {
        c.detail = element_to_text(family.spec, x) + ": closed form " + std::to_string(*cf) + ", oracle " +
                   (ol.has_value() ? std::to_string(*ol) : std::string("inf-cap"));
        return c;
      }
      ++checked;
    }
    c.pass = true;
    c.detail = std::to_string(checked) + " lattice points agree";
  } catch (const Error& e) {
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

SuiteReport suite_examples() {
  SuiteReport report;
  report.suite = "examples";
  for (std::int64_t m = 1; m <= 8; ++m) report.cases.push_back(one_union_case(m));
  report.cases.push_back(primes_closed_form_case());
  report.cases.push_back(axes_closed_form_case(2));
  report.cases.push_back(axes_closed_form_case(3));
  return report;
}

}  // namespace

// ─── Lemma properties (acceptance) ───────────────────────────────────────

SuiteReport run_lemma_property_suite() {
  SuiteReport report;
  report.suite = "lemma-properties";

  struct Config {
    GeneratorFamily family;
    std::string name;
    int cap;
  };
  std::vector<Config> configs;
  configs.push_back({make_naturals_except({2, 4}), "N\\{2,4}", 3});
  configs.push_back({make_one_union_multiples(3), "{1} u 3N", 3});
  configs.push_back({make_lemma2s(3), "A_3 over Z x Z/2Z", 3});

  std::size_t triples = 0;
  for (const auto& config : configs) {
    SuiteCase c;
    c.name = "symmetry/triangle/translate on " + config.name;
    try {
      const ObservationWindow window{8};
      const auto cert = stabilize_table(config.family, window, config.cap);
      const auto& table = cert.table;
      const auto& spec = config.family.spec;
      std::size_t local = 0;
      auto len_of = [&](const GroupElement& x) {
        const auto len = table_lookup(table, x);
        if (!len.has_value()) throw DomainError("unexpected inf-cap entry");
        return *len;
      };
      // identity is the unique length-0 entry
      for (const auto& [elem, len] : table.entries) {
        const bool zero = len.has_value() && *len == 0;
        if (zero != is_identity(spec, elem)) throw DomainError("length-0 entry is not the identity");
      }
      // symmetry
      for (const auto& [elem, len] : table.entries) {
        if (len_of(negate(spec, elem)) != *len) {
          throw DomainError("symmetry fails at " + element_to_text(spec, elem));
        }
        ++local;
      }
      // triangle inequality on all window pairs whose sum stays inside
      for (const auto& [x, lx] : table.entries) {
        for (const auto& [y, ly] : table.entries) {
          const auto sum = add(spec, x, y);
          if (!window_contains(spec, window, sum)) continue;
          if (len_of(sum) > *lx + *ly) {
            throw DomainError("triangle fails at " + element_to_text(spec, x) + " + " +
                              element_to_text(spec, y));
          }
          ++local;
        }
      }
      // translate bound |l(x+a) - l(x)| <= 1 for truncation generators a
      const auto members = first_members(config.family, cert.table.truncation);
      for (const auto& a : members) {
        if (!window_contains(spec, window, a)) continue;
        for (const auto& [x, lx] : table.entries) {
          const auto shifted = add(spec, x, a);
          if (!window_contains(spec, window, shifted)) continue;
          if (std::abs(len_of(shifted) - *lx) > 1) {
            throw DomainError("translate bound fails at " + element_to_text(spec, x) + " + " +
                              element_to_text(spec, a));
          }
          ++local;
        }
      }
      triples += local;
      c.pass = true;
      c.detail = std::to_string(local) + " triples checked";
    } catch (const Error& e) {
      c.detail = std::string("error: ") + e.what();
    }
    report.cases.push_back(c);
  }

  {
    SuiteCase c;
    c.name = "total sampled triples >= 1000";
    c.pass = triples >= 1000;
    c.detail = std::to_string(triples) + " triples across " + std::to_string(configs.size()) + " families";
    report.cases.push_back(c);
  }

  // Cut and r-sequence lemmas on every geodesic word in a small window.
  {
    SuiteCase c;
    c.name = "cut + r-sequence lemmas on all geodesics (N <= 8)";
    try {
      const auto family = make_naturals_except({2, 4});
      const ObservationWindow window{8};
      const int cap = 3;
      const auto cert = stabilize_table(family, window, cap);
      const auto members = first_members(family, cert.table.truncation);
      OracleTable oracle(family.spec, members, cap);
      std::size_t words = 0;
      for (const auto& x : enumerate_window(family.spec, window)) {
        for (const auto& word : geodesic_words(family.spec, members, x, cap)) {
          if (word.empty()) continue;
          if (!check_cut_lemma(oracle, word)) {
            throw DomainError("cut lemma fails for a geodesic of " + element_to_text(family.spec, x));
          }
          const auto prefixes = prefix_lengths(oracle, word);
          for (int r = 0; r <= static_cast<int>(word.size()); ++r) {
            if (!check_r_sequence(oracle, word, r)) {
              throw DomainError("r-sequence lemma fails for a geodesic of " +
                                element_to_text(family.spec, x));
            }
          }
          // u-sequence: consecutive prefix lengths differ by at most 1
          for (std::size_t i = 1; i < prefixes.size(); ++i) {
            if (std::abs(prefixes[i] - prefixes[i - 1]) > 1) {
              throw DomainError("prefix lengths jump by more than 1");
            }
          }
          ++words;
        }
      }
      c.pass = words > 0;
      c.detail = std::to_string(words) + " geodesic words checked without exception";
    } catch (const Error& e) {
      c.detail = std::string("error: ") + e.what();
    }
    report.cases.push_back(c);
  }
  return report;
}

// ─── Oracle equivalence (acceptance) ─────────────────────────────────────

SuiteReport run_oracle_equivalence_suite() {
  SuiteReport report;
  report.suite = "oracle-equivalence";

  struct Config {
    GeneratorFamily family;
    std::string name;
    std::int64_t window;
    int cap;
  };
  GroupElement three, four;
  three.free.push_back(3);
  four.free.push_back(4);
  std::vector<Config> configs;
  configs.push_back({make_explicit_finite(GroupSpec::lattice(1, 0), {three, four}), "explicit {3,4}", 12, 4});
  configs.push_back({make_naturals_except({2}), "naturals_except {2}", 12, 3});
  configs.push_back({make_one_union_multiples(4), "one_union_multiples 4", 12, 4});
  configs.push_back({make_coordinate_axes(2), "coordinate_axes 2", 3, 3});
  configs.push_back({make_primes(), "primes", 10, 4});
  configs.push_back({make_nathanson(3, {2}), "nathanson r=3 W={2}", 12, 4});
  configs.push_back({make_lemma2s(3), "lemma2s s=3", 10, 3});
  configs.push_back({make_lemma3s(3), "lemma3s s=3", 10, 4});
  configs.push_back({product_sum(make_naturals_except({1}), make_naturals_except({2})),
                     "product_sum(N\\{1}, N\\{2})", 4, 4});
  configs.push_back({product_max(make_naturals_except({1}), make_naturals_except({2})),
                     "product_max(N\\{1}, N\\{2})", 3, 3});

  OracleOptions opts;
  opts.max_closure = 256;

  for (const auto& config : configs) {
    SuiteCase c;
    c.name = config.name + " (N=" + std::to_string(config.window) + ", cap=" + std::to_string(config.cap) + ")";
    try {
      const ObservationWindow window{config.window};
      const auto cert = stabilize_table(config.family, window, config.cap);
      const auto members = first_members(config.family, cert.table.truncation);
      OracleTable oracle(config.family.spec, members, config.cap, opts);
      std::size_t mismatches = 0, checked = 0;
      for (const auto& [elem, len] : cert.table.entries) {
        const auto expect = oracle.length(elem);
        if (expect != len) ++mismatches;
        ++checked;
      }
      c.pass = mismatches == 0;
      c.detail = std::to_string(checked) + " elements, " + std::to_string(mismatches) + " mismatches";
    } catch (const Error& e) {
      c.detail = std::string("error: ") + e.what();
    }
    report.cases.push_back(c);
  }
  return report;
}

// ─── Dispatch / rendering ────────────────────────────────────────────────

bool SuiteReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.pass; });
}

std::string SuiteReport::to_text() const {
  std::string out = "suite " + suite + "\n";
  for (const auto& c : cases) {
    out += std::string(c.pass ? "  PASS " : "  FAIL ") + c.name + ": " + c.detail + "\n";
  }
  out += passed() ? "ALL PASS\n" : "FAILURES PRESENT\n";
  return out;
}

std::string SuiteReport::to_json_string() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cases) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    arr.push_back(std::move(cj));
  }
  j["cases"] = std::move(arr);
  j["pass"] = passed();
  return j.dump();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"zphases", "lemma2s", "lemma3s",
                                              "oddphase", "products", "examples"};
  return names;
}

SuiteReport run_suite(const std::string& name) {
  if (name == "zphases") return suite_zphases();
  if (name == "lemma2s") return suite_lemma2s();
  if (name == "lemma3s") return suite_lemma3s();
  if (name == "oddphase") return suite_oddphase();
  if (name == "products") return suite_products();
  if (name == "examples") return suite_examples();
  throw DomainError("unknown suite '" + name + "' (expected one of: zphases, lemma2s, lemma3s, oddphase, products, examples)");
}

}  // namespace phaseforge
