#pragma once

#include <stdexcept>
#include <string>

namespace verity {

/// Base for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input bytes did not match the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace verity
