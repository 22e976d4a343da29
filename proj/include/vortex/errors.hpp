#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

// Argument outside the mathematical domain of an operation (negative radius,
// coincident kernel points, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Invalid user-facing input: configs, windows, tolerances.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string &what, int line = 0)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) +
                                             ": " + what
                                       : what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

// A numerical procedure could not reach its requested accuracy, or produced
// a non-finite value.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vortex
