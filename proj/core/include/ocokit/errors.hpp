#pragma once

#include <stdexcept>
#include <string>

namespace ocokit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the region where an operation is defined
/// (e.g. a zero coordinate as the prox center of the entropy setup).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed numeric input: non-finite vectors, dimension mismatches.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (schedules, schemes, regimes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A reference solver could not certify its answer.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// A decision read data that its information contract does not allow.
class InformationFlowError : public Error {
 public:
  using Error::Error;
};

/// Instance or config file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ocokit
