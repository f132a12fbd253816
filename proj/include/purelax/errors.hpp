#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace purelax {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (shapes, probabilities, bounds).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A block of the partition carries zero total weight.
class DegenerateBlock : public Error {
 public:
  using Error::Error;
};

/// Affine-dependence elimination could not make progress.
class NumericalDegeneracy : public Error {
 public:
  NumericalDegeneracy(const std::string& what, std::size_t cell = npos)
      : Error(what), cell_(cell) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// The simplex method exceeded its iteration budget.
class IterationLimit : public Error {
 public:
  using Error::Error;
};

/// The LP solver lost numerical accuracy beyond recovery.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A purification LP that must be feasible was not; indicates a broken certificate.
class InternalInfeasible : public Error {
 public:
  using Error::Error;
};

/// The robust problem has no randomized decision meeting every budget.
class InfeasibleConstraints : public Error {
 public:
  using Error::Error;
};

class UnboundedProblem : public Error {
 public:
  using Error::Error;
};

class UnknownParameter : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration was asked to visit too many decisions.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class MisalignedParameter : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidDensity : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace purelax
