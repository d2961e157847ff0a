#pragma once

#include <stdexcept>
#include <string>

namespace immunokinetics {

/// Bad input: parameters, kernels, configuration files, step sizes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel ingredient evaluated to a non-finite value or broke the
/// probability constraints (c_max + c0 <= 1).
class KernelError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// The birth function has no positive equilibrium for the given death rate.
class NoEquilibriumError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Failure while a run is in progress.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExtinctionError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class PositivityError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class NormalizationError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class QuadratureError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace immunokinetics
