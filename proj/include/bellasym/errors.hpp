#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bellasym {

// Faults in user-supplied data: malformed files, invalid tables or
// strategies, out-of-range parameters.  The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text in a game or strategy file; carries the 1-based line.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Structurally valid input whose values break an invariant (probabilities
// not summing to one, negative weights, budgets outside [0,1], ...).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// An index referring outside its declared range.
class RangeError : public InputError {
 public:
  using InputError::InputError;
};

// A name that resolves to nothing (unknown built-in game, missing file).
class LookupError : public InputError {
 public:
  using InputError::InputError;
};

// Objects whose dimensions do not match where they must.
class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

// Work that would exceed an explicit enumeration cap.
class CapacityError : public InputError {
 public:
  using InputError::InputError;
};

// An operation applied outside its mathematical domain (division by a
// zero marginal, conditioning on impossible data, ...).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

// Relative knowledge of a party whose settings carry zero entropy.
class UndefinedRatioError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Internal numeric failure: infeasible or unbounded programs, singular
// bases, pivot caps.  The CLI maps these to exit code 2.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bellasym
