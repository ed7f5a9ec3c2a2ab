#pragma once

#include <stdexcept>
#include <string>

namespace sphcap {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid weight/basis/operator parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A computation lost accuracy beyond what double precision supports.
class AccuracyLossError : public Error {
 public:
  using Error::Error;
};

/// A polynomial degree beyond the extent of a recurrence table was requested.
class TableExtentError : public Error {
 public:
  using Error::Error;
};

/// Coefficient-vector / matrix ordering tags do not match.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be block-diagonal across Fourier modes is not.
class NotDecoupledError : public Error {
 public:
  using Error::Error;
};

/// A diagonal block of a linear system is singular.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, int mode)
      : Error(what), mode_(mode) {}
  /// Fourier mode of the offending block, or -1 for a coupled system.
  int mode() const { return mode_; }

 private:
  int mode_ = -1;
};

/// Division by zero while forming recurrence-coefficient matrices.
class DegenerateRecurrenceError : public Error {
 public:
  using Error::Error;
};

/// A variable coefficient needs more degrees than the truncation allows.
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// Boundary data cannot be resolved to the requested degree.
class BoundaryResolutionError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (files, point lists).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace sphcap
