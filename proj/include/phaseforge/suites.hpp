#pragma once

#include <string>
#include <vector>

namespace phaseforge {

struct SuiteCase {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCase> cases;

  bool passed() const;
  std::string to_text() const;
  std::string to_json_string() const;
};

// The named verification suites: zphases, lemma2s, lemma3s, oddphase,
// products, examples. Unknown names raise DomainError.
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name);

// Acceptance-only property suites.
SuiteReport run_lemma_property_suite();
SuiteReport run_oracle_equivalence_suite();

}  // namespace phaseforge
