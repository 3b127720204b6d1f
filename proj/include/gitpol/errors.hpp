#pragma once

#include <stdexcept>
#include <string>

namespace gitpol {

// Malformed user input: bad JSON field, rational, polynomial, shape. CLI exit code 2.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Internal invariant violation or misuse of an API (shape mismatch). CLI exit code 3.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

}  // namespace gitpol
