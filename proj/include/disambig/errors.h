#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace disambig {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or record. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
        source_(source),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// A domain type would be constructed in a state that breaks its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// An operation was called with arguments outside its contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Lookup of an intent, session or other named entity failed.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Operation not valid in the current state (e.g. message to a closed session).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace disambig
