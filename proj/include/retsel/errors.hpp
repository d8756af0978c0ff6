#pragma once

#include <stdexcept>
#include <string>

namespace retsel {

// Caller misused an API contract (bad k, empty query, ...). CLI exit code 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (parse failures, duplicate ids,
// dimension mismatches, ...). CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace retsel
