#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed values: length mismatches, mismatched domains, overlapping pieces.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A point or sub-domain lies outside the carrier of a domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numeric parameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A measured inequality exceeded its bound, or an input violated a
/// precondition that is checked numerically (vanishing, coherence).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Grid or digit resolution too coarse for the requested construction.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but outside what the library can realize.
class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ldom
