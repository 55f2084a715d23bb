// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace skadapt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor extents or ranks.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the differentiation graph (non-scalar backward, missing grads,
/// non-finite values during a gradient check).
class GradError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid dataset content. `record()` is the 0-based record index when the
/// failure can be attributed to one record.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message,
                     std::optional<std::size_t> record = std::nullopt)
      : Error(record ? "record " + std::to_string(*record) + ": " + message
                     : message),
        record_(record) {}

  std::optional<std::size_t> record() const noexcept { return record_; }

 private:
  std::optional<std::size_t> record_;
};

}  // namespace skadapt
