#pragma once

#include <stdexcept>
#include <string>

namespace rednet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or layer geometry do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed (bad magic, truncated payload, checksum).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A numeric value is outside its documented domain, or became non-finite.
class ValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace rednet
