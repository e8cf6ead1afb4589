#pragma once

#include <stdexcept>
#include <string>

namespace tam {

// Base class for all library failures. `exit_code()` maps onto the CLI
// convention: 1 usage/parameter, 2 numerical failure.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg, int exit_code = 2)
      : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

// Bad arguments or inconsistent configuration.
class InvalidParameterError : public Error {
 public:
  explicit InvalidParameterError(const std::string& msg) : Error(msg, 1) {}
};

// Graph generation exhausted its retry/swap budget.
class SamplingFailureError : public Error {
 public:
  explicit SamplingFailureError(const std::string& msg) : Error(msg) {}
};

// Inputs that should describe the same object disagree (e.g. a value keyed
// outside a graph's edge set).
class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& msg) : Error(msg) {}
};

// An iterative solver did not reach its tolerance. Callers that can make use
// of the best iterate obtain it from the throwing site's payload type.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Row truncation destroyed the rank of an orthonormal iterate.
class DegenerateTruncationError : public Error {
 public:
  explicit DegenerateTruncationError(const std::string& msg) : Error(msg) {}
};

// A matrix that must span a k-dimensional subspace is rank deficient.
class InvalidSubspaceError : public Error {
 public:
  explicit InvalidSubspaceError(const std::string& msg) : Error(msg) {}
};

// A guaranteed-by-construction property failed; indicates a library bug.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& msg) : Error(msg) {}
};

}  // namespace tam
