#pragma once

#include <stdexcept>
#include <string>

namespace minlen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a map, e.g. |q| >= q0.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A normalized input was required but the density does not integrate to one.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Grid extension or refinement exhausted its node budget.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// An integral of a heavy-tailed density does not converge.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double partial, double tail_estimate)
      : Error(what), partial_(partial), tail_estimate_(tail_estimate) {}
  double partial() const noexcept { return partial_; }
  double tail_estimate() const noexcept { return tail_estimate_; }

 private:
  double partial_;
  double tail_estimate_;
};

class MomentDivergence : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

}  // namespace minlen
