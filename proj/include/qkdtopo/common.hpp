#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace qkdtopo {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Base class for all recoverable errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input document (topology file, demand file, solution file, config).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Structurally well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure.
class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Unrecoverable numerical failure inside the LP/MILP solver.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

/// Deterministic double formatting for exported artifacts (%.17g round-trips
/// exactly and is byte-stable for identical inputs).
std::string format_double(double x);

}  // namespace qkdtopo
