// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each named suite runs twice so the determinism criterion can
// compare serialized reports byte for byte.

#include "phaseforge/suites.hpp"

#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace {

struct Criterion {
  std::string label;
  bool pass = false;
  std::string detail;
};

std::string case_summary(const phaseforge::SuiteReport& report, const std::string& prefix = "") {
  std::size_t total = 0, passed = 0;
  std::string first_failure;
  for (const auto& c : report.cases) {
    if (!prefix.empty() && c.name.rfind(prefix, 0) != 0) continue;
    ++total;
    if (c.pass) {
      ++passed;
    } else if (first_failure.empty()) {
      first_failure = c.name + ": " + c.detail;
    }
  }
  std::string out = std::to_string(passed) + "/" + std::to_string(total) + " cases";
  if (!first_failure.empty()) out += " — first failure: " + first_failure;
  return out;
}

bool all_pass(const phaseforge::SuiteReport& report, const std::string& prefix = "") {
  for (const auto& c : report.cases) {
    if (!prefix.empty() && c.name.rfind(prefix, 0) != 0) continue;
    if (!c.pass) return false;
  }
  return true;
}

}  // namespace

int main() {
  using phaseforge::SuiteReport;
  std::vector<Criterion> criteria;

  std::map<std::string, SuiteReport> first_runs;
  std::map<std::string, std::string> first_json, second_json;

  auto run_twice = [&](const std::string& name, auto&& runner) {
    SuiteReport first = runner();
    first_json[name] = first.to_json_string();
    SuiteReport second = runner();
    second_json[name] = second.to_json_string();
    first_runs.emplace(name, std::move(first));
  };

  for (const auto& name : phaseforge::suite_names()) {
    run_twice(name, [&name] { return phaseforge::run_suite(name); });
  }
  run_twice("lemma-properties", [] { return phaseforge::run_lemma_property_suite(); });
  run_twice("oracle-equivalence", [] { return phaseforge::run_oracle_equivalence_suite(); });

  const auto& zphases = first_runs.at("zphases");
  {
    Criterion c;
    c.label = "criterion 1 (zphases r in {3,4,5}): S_A(r) = W u (-W) exactly at both windows";
    c.pass = all_pass(zphases, "r=3") && all_pass(zphases, "r=4") && all_pass(zphases, "r=5");
    c.detail = case_summary(zphases, "r=3") + "; " + case_summary(zphases, "r=4") + "; " +
               case_summary(zphases, "r=5");
    criteria.push_back(c);
  }
  {
    Criterion c;
    c.label = "criterion 2 (r=2 suite): NaturalsExcept(W) has transition (2, 2|W|) with set W u (-W)";
    c.pass = all_pass(zphases, "r=2");
    c.detail = case_summary(zphases, "r=2");
    criteria.push_back(c);
  }
  {
    const auto& l2 = first_runs.at("lemma2s");
    const auto& l3 = first_runs.at("lemma3s");
    Criterion c;
    c.label = "criterion 3 (lemma suites): transitions (2,s) and (3,s) with exact torsion-ball sets";
    c.pass = l2.passed() && l3.passed();
    c.detail = "lemma2s " + case_summary(l2) + "; lemma3s " + case_summary(l3);
    criteria.push_back(c);
  }
  {
    const auto& products = first_runs.at("products");
    Criterion c;
    c.label = "criterion 4 (product suites): (r1+r2, s1*s2), max-radius window-growing, convolution";
    c.pass = products.passed();
    c.detail = case_summary(products);
    criteria.push_back(c);
  }
  {
    const auto& oddphase = first_runs.at("oddphase");
    Criterion c;
    c.label = "criterion 5 (odd-phase suite): transition (r, s) for r in {2..5}, s in {1,3}";
    c.pass = oddphase.passed();
    c.detail = case_summary(oddphase);
    criteria.push_back(c);
  }
  {
    const auto& examples = first_runs.at("examples");
    Criterion c;
    c.label = "criterion 6 (examples suite): multiples bound, primes and axes closed forms";
    c.pass = examples.passed();
    c.detail = case_summary(examples);
    criteria.push_back(c);
  }
  {
    const auto& lemmas = first_runs.at("lemma-properties");
    Criterion c;
    c.label = "criterion 7 (lemma properties): symmetry, triangle, translate, cut, r-sequence";
    c.pass = lemmas.passed();
    c.detail = case_summary(lemmas);
    criteria.push_back(c);
  }
  {
    const auto& oracle = first_runs.at("oracle-equivalence");
    Criterion c;
    c.label = "criterion 8 (oracle equivalence): engine equals oracle on every test window";
    c.pass = oracle.passed();
    c.detail = case_summary(oracle);
    criteria.push_back(c);
  }
  {
    Criterion c;
    c.label = "criterion 9 (determinism): repeated suite runs serialize byte-identically";
    c.pass = true;
    std::size_t compared = 0;
    for (const auto& [name, json] : first_json) {
      ++compared;
      if (second_json.at(name) != json) {
        c.pass = false;
        c.detail = "suite " + name + " differed between runs";
        break;
      }
    }
    if (c.pass) c.detail = std::to_string(compared) + " suite reports identical across two runs";
    criteria.push_back(c);
  }

  bool all = true;
  for (const auto& c : criteria) {
    std::printf("[%s] %s — %s\n", c.pass ? "PASS" : "FAIL", c.label.c_str(), c.detail.c_str());
    all &= c.pass;
  }
  std::printf("ACCEPTANCE: %zu/%zu criteria passed\n",
              static_cast<std::size_t>(std::count_if(criteria.begin(), criteria.end(),
                                                     [](const Criterion& c) { return c.pass; })),
              criteria.size());
  return all ? 0 : 1;
}
