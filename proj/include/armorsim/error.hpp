#pragma once

#include <stdexcept>
#include <string>

namespace armorsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input (bad geometry, non-positive material constant, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class UnknownName : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The jet closure produced a geometrically impossible configuration.
class ModelBreakdown : public Error {
 public:
  using Error::Error;
};

/// Explicit time step violates the stability limit, or fields went non-finite.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Schema violation in a scenario document. Carries the dotted key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what, int line = 0)
      : Error(format(path, what, line)), path_(std::move(path)), line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& path, const std::string& what, int line) {
    std::string msg = "config error at '" + path + "'";
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    return msg + ": " + what;
  }

  std::string path_;
  int line_;
};

/// Error raised inside one pipeline stage, labelled with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace armorsim
