#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixgt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, inconsistent data or configuration. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateDistributionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// No cluster survived and there is no label to anchor the pixel.
class EmptyMixtureError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UndefinedMetricError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// File system and serialization failures. The CLI maps these to exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public IoError {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : IoError(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class UnsupportedFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace mixgt
