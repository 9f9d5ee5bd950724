#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace phaseforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or inputs outside an operation's stated domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Element does not conform to the group spec it is used with.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Evidence contradicts the fundamental growth shape. Treated as an internal
// error (engine bug or insufficient truncation), never as a refutation.
class ConsistencyViolation : public Error {
 public:
  using Error::Error;
};

struct DivergentEntry {
  std::string element;  // canonical text form
  std::string length_before;
  std::string length_after;
  std::size_t k_before = 0;
  std::size_t k_after = 0;
};

// Truncation levels kept disagreeing up to the configured ceiling.
class StabilizationFailure : public Error {
 public:
  StabilizationFailure(const std::string& msg, std::vector<DivergentEntry> entries)
      : Error(msg), divergent(std::move(entries)) {}
  std::vector<DivergentEntry> divergent;
};

}  // namespace phaseforge
