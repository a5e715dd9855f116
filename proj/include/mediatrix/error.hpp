#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mediatrix {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconsistentTheory : Error {
  using Error::Error;
};

// Raised by backward search when the depth bound cut off every branch that
// might still have produced a proof.
struct DepthExceeded : Error {
  using Error::Error;
};

struct IncoherentInput : Error {
  using Error::Error;
};

struct NotOwner : Error {
  using Error::Error;
};

struct RealismViolation : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct ParseError : Error {
  std::size_t line;
  std::size_t column;
  std::string expected;

  ParseError(std::size_t line, std::size_t column, std::string expected, const std::string& found)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": expected " + expected +
              ", found " + found),
        line(line),
        column(column),
        expected(std::move(expected)) {}
};

}  // namespace mediatrix
