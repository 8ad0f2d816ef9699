#pragma once

#include <stdexcept>
#include <string>

#include "flash/source_span.hpp"

namespace flash {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, const std::string& message)
      : Error(span.to_string() + ": " + message), span_(span) {}

  const SourceSpan& span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

/// A design that fails validation was handed to an operation requiring a
/// valid one.
class InvalidDesign : public Error {
 public:
  using Error::Error;
};

/// A value is consumed at a stage earlier than the stage producing it.
class CausalityViolation : public Error {
 public:
  using Error::Error;
};

class UseBeforeDef : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class InvalidDepth : public Error {
 public:
  using Error::Error;
};

/// Simulator invariant breach. Never caused by the simulated design itself.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NonTerminating : public Error {
 public:
  using Error::Error;
};

}  // namespace flash
