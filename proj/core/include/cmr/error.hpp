#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Array shapes or lengths do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, CG breakdown and similar numeric failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An unrolled gradient scheme produced non-finite values (step size too large).
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class DegenerateMaskError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed container file. `offset()` is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(std::uint64_t offset, const std::string& what)
      : Error("format error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace cmr
