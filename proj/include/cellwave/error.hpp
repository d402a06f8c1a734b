#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellwave {

/// Model definition is inconsistent (unknown symbol, bad stoichiometry, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or semantic error in model / expression text, with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message,
             std::vector<std::string> expected = {});

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
  std::vector<std::string> expected_;
};

/// NaN/Inf produced by a time stepper.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(double time, std::size_t grid_index, const std::string& what);

  double time() const { return time_; }
  std::size_t grid_index() const { return grid_index_; }

 private:
  double time_;
  std::size_t grid_index_;
};

/// An analysis has no answer for the given input (no fold, no jump, no
/// convergence); the message says which.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (CLI flags, config files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cellwave
