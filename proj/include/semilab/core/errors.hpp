#pragma once

#include <stdexcept>
#include <string>

namespace semilab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration record is malformed or inconsistent; `path` names the field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Numerical failure: under-resolution, aliasing, support escape, integrator breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SupportEscapeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AliasingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace semilab
