#pragma once

#include <stdexcept>
#include <string>

namespace ftct {

// Malformed text input (index sets, plans, grids, configuration files).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A well-formed request with no admissible answer, e.g. a truncation that
// leaves the top layer empty or a coefficient problem over an empty set.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ftct
