#pragma once

#include <stdexcept>
#include <string>

namespace wallfinder {

// Base type for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument or configuration value is outside its legal range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-spec wire data.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class UnknownPacketIdError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class TruncatedFrameError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class BadMagicError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class WrongLengthError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Scenario file could not be read, parsed, or validated.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace wallfinder
