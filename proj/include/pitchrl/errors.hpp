#pragma once

#include <stdexcept>
#include <string>

namespace pitchrl {

// Base of every error the library raises. Each subclass names the contract
// that was violated so callers (and the CLI exit-code mapping) can tell
// configuration problems apart from runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ActionArityError : public Error {
 public:
  using Error::Error;
};

class SteppedTerminalError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class NonStochasticChain : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class CheckpointFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

class EmptyLog : public Error {
 public:
  using Error::Error;
};

}  // namespace pitchrl
