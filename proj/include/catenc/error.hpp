#pragma once

#include <stdexcept>
#include <string>

namespace catenc {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller-supplied parameters or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File access, CSV parsing and column lookup failures.
class IngestError : public Error {
 public:
  using Error::Error;
};

// An encoder could not be fitted or applied to the given data.
class EncoderError : public Error {
 public:
  using Error::Error;
};

// Numeric kernel failures: non-finite input, singular systems.
class NumericError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void fail_invalid(const std::string& what);

}  // namespace catenc
