#pragma once
#include <stdexcept>
#include <string>

namespace ocgraph {

// Problems with user-supplied inputs: files, flags, shapes, class names.
// The CLI maps this family to exit code 2; everything else exits 1.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed row in a dataset file. Message carries path and 1-based line.
struct ParseError : ValidationError {
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : ValidationError(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

// Shape disagreement between operands.
struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

// Invalid hyperparameter or layer configuration.
struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

// Not enough anomalous nodes to fill the requested val/test halves.
struct CapacityError : ValidationError {
  using ValidationError::ValidationError;
};

// AUC requested on a single-class score set.
struct UndefinedMetricError : ValidationError {
  using ValidationError::ValidationError;
};

// Unreadable or truncated checkpoint / split file, or version mismatch.
struct CorruptFileError : ValidationError {
  using ValidationError::ValidationError;
};

// Training produced a non-finite loss.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ocgraph
