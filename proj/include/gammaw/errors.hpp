#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gammaw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; `position` is a byte offset into the source.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position(position) {}
  std::size_t position;
};

/// Coordinate index outside the field dimension.
struct IndexError : Error {
  using Error::Error;
};

/// Evaluation hit a singular point (log/sqrt/division/power domain boundary).
struct DomainError : Error {
  using Error::Error;
};

/// W(x) is (numerically) zero where a quotient by W was requested.
struct WeightVanishes : DomainError {
  using DomainError::DomainError;
};

/// Too many Euler-Maruyama paths left the overflow guard.
struct PathFailure : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace gammaw
