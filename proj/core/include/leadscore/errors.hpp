#pragma once

#include <stdexcept>
#include <string>

namespace leadscore {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input file does not match the declared schema (missing column, bad layout).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A value could not be parsed; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Duplicate (lead_id, quarter, week) within one batch.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

// Argument outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Training or composition input that is missing or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Source-quarter resolution produced an unusable set.
class PolicyError : public Error {
 public:
  using Error::Error;
};

// Labels are all one class; nothing to learn or rank.
class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

// Metric has no defined value on this input (e.g. AUC on a single class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Non-finite value encountered during optimization.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, int iteration = -1)
      : Error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")" : what),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Persisted file carries a format version this build does not understand.
class VersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace leadscore
