#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace slidemesh {

/// Base class for all failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration (bad key, missing section,
/// unresolved boundary tag, invalid material parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or inconsistent geometry: inverted elements, facets off the
/// declared interface curve, broken cut-measure conservation.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Nonlinear or linear solve failure. Carries the residual history of the
/// Newton loop when available.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

/// Direct sparse factorization or back-substitution failure.
class LinearSolveError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Non-finite values encountered during assembly; message names the element.
class AssemblyError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Material model evaluated outside its admissible range (e.g. WLF window).
class MaterialRangeError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// File system and serialization failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace slidemesh
