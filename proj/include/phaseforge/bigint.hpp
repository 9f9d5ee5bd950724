#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace phaseforge {

// Exact unbounded-precision integer. Sequence values grow geometrically with
// index, so fixed-width words are never safe here.
using BigInt = boost::multiprecision::cpp_int;

// Strict decimal parse: optional leading '-', digits only. Throws DomainError.
BigInt big_from_decimal(const std::string& text);

std::string big_to_decimal(const BigInt& v);

// Throws DomainError when v does not fit in int64.
std::int64_t to_i64_checked(const BigInt& v, const char* what);

bool fits_i64(const BigInt& v);

}  // namespace phaseforge
