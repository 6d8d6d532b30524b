#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tribasis {

/// Raised by the OLS solve when the Gram matrix is numerically singular.
class IllConditionedError : public std::runtime_error {
public:
  IllConditionedError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

private:
  double condition_estimate_;
};

/// Model file could not be read back.
class ModelFormatError : public std::runtime_error {
public:
  enum class Kind { version, truncated, dimension, malformed };

  ModelFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// Dataset ingestion failure. `line()` is 1-based; 0 when not tied to a line.
class DatasetError : public std::runtime_error {
public:
  enum class Kind { empty, malformed, dimension, out_of_range };

  DatasetError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        kind_(kind),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

private:
  Kind kind_;
  std::size_t line_;
};

}  // namespace tribasis
