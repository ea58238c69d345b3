#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace callas {

/// Function name. Labels and variables live in disjoint namespaces.
struct Label {
  std::string name;
  auto operator<=>(const Label&) const = default;
};

struct Variable {
  std::string name;
  auto operator<=>(const Variable&) const = default;
};

inline const Variable kSelf{"self"};

/// Raised when the interpreter reaches a state the semantics rules out
/// (open terms at run time, broken scheduler preconditions).
struct InterpreterError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace callas
