#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphmass {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression text could not be parsed. `position()` is a 0-based offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A function was evaluated outside its domain (log of a non-positive value,
/// the radial coordinate at the origin, a point inside a horizon, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of a mass identity or inequality does not hold for the input.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Quadrature tail fit or limit extrapolation failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphmass
