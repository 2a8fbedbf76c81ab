#pragma once

#include <stdexcept>
#include <string>

namespace tbrain {

// Every failure surfaced by the library derives from Error so callers (and the
// CLI) can map categories to distinct diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class DuplicateNameError : public Error {
 public:
  using Error::Error;
};

class UndefinedProbabilityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};

}  // namespace tbrain
