#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsival {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inputs violate a precondition or a stored summary disagrees with geometry.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Malformed binary or text input. Carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// A generator could not satisfy its budget within the attempt cap.
class BudgetError : public Error {
public:
  using Error::Error;
};

} // namespace hsival
