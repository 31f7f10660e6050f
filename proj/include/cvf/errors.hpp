#pragma once

#include <stdexcept>
#include <string>

namespace cvf {

/// Base class for failures of the numerical pipeline (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated or observed sample cannot support the requested statistic.
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No point of the box satisfies the equality rows.
class Infeasible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Pivoting exceeded its iteration cap.
class NumericalFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external power-curve overlay.
class BadOverlay : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvf
