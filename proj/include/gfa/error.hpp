#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gfa {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, out-of-range argument, malformed dataset.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate or failed factorization.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Operation is well formed but has nothing to return (empty trace,
// all chains failed, no evaluable sets).
class NoResult : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// On-disk artifact is inconsistent (missing file, hash mismatch, bad shape).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace gfa
