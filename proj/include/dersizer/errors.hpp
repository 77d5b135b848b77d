#pragma once

#include <stdexcept>
#include <string>

namespace dersizer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete profile data (missing hours, bad header, ...).
class IngestError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain invariant (negative load, V outside [0,1], ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad study configuration or unreadable/unwritable path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The model builder was handed inputs it cannot turn into a well-posed MILP.
class BuildError : public Error {
 public:
  using Error::Error;
};

/// Solver contract violation: unknown status, numerical breakdown, guard exceeded.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The audit was asked to check a solution that lacks dispatch data.
class AuditError : public Error {
 public:
  using Error::Error;
};

}  // namespace dersizer
