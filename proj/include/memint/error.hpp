#pragma once

#include <stdexcept>
#include <string>

namespace memint {

// Raised for invalid configuration, malformed input files and contract
// violations detected at run time.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A simulator invariant was broken. Always a bug, never a user error.
class InternalFault : public std::logic_error {
 public:
  explicit InternalFault(const std::string& what) : std::logic_error(what) {}
};

}  // namespace memint
