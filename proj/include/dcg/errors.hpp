#pragma once

#include <stdexcept>
#include <string>

namespace dcg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block counts or block dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (non-finite data, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not offered by this set variant.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Graph is not connected, or a connected sample could not be drawn.
class ConnectivityError : public Error {
 public:
  ConnectivityError(const std::string& what, int attempts = 0)
      : Error(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

/// Malformed or invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcg
