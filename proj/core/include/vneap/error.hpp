#ifndef VNEAP_ERROR_HPP_
#define VNEAP_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vneap {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A domain object violates one of its construction invariants.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Committing an embedding would overdraw the ledger.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

/// Internal bookkeeping broken (e.g. release of an unknown embedding).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Versioned file does not match the expected schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Tensor / parameter block shape disagreement.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Instance exceeds a configured size or enumeration limit.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Random generator could not produce a valid object.
class GenerationFailure : public Error {
 public:
  using Error::Error;
};

/// Ratio requested for a zero-cost alternative.
class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

}  // namespace vneap

#endif  // VNEAP_ERROR_HPP_
