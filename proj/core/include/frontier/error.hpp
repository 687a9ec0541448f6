#pragma once

#include <stdexcept>
#include <string>

namespace frontier {

// Bad input data or configuration; the CLI maps this to exit code 1.
class UserError : public std::runtime_error {
 public:
  explicit UserError(const std::string& what) : std::runtime_error(what) {}
};

// Violated internal invariant; the CLI maps this to exit code 2.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace frontier
