#pragma once

#include <stdexcept>
#include <string>

namespace trappedset {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (non-finite fields, overflow guards).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or run configuration. The CLI maps this to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (orbit count, search space) would be exceeded.
/// The CLI maps this to exit status 3.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A query reaches past the horizon the spectrum was generated for.
class OutOfHorizonError : public Error {
 public:
  using Error::Error;
};

/// The spectrum is not certified complete over the requested support.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

/// A resonance sum cannot reach the requested tolerance inside its box.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class EstimatorError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace trappedset
