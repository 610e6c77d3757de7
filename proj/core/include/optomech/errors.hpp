#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace optomech {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelErrc {
  EmptyMembraneList,
  NonPositiveRate,
  OverdeterminedDrive,
  UnderdeterminedDrive,
  NonFiniteValue,
};

/// Rejected system parameters. `subject()` names the offending field.
class ModelError : public Error {
 public:
  ModelError(ModelErrc code, std::string subject, const std::string& what);

  ModelErrc code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ModelErrc code_;
  std::string subject_;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class SpectralErrc {
  DivergentGroupVelocity,
  InvalidGrid,
  GridTooCoarse,
  IndexOutOfRange,
};

class SpectralError : public Error {
 public:
  SpectralError(SpectralErrc code, const std::string& what,
                std::optional<std::size_t> required_points = std::nullopt);

  SpectralErrc code() const noexcept { return code_; }
  /// Set for GridTooCoarse: the grid size that would satisfy the density rule.
  std::optional<std::size_t> required_points() const noexcept { return required_points_; }

 private:
  SpectralErrc code_;
  std::optional<std::size_t> required_points_;
};

enum class DynamicsErrc {
  InvalidProtocol,
  InvalidOptions,
  StepSizeUnderflow,
  NonFiniteState,
  NoRetrievedPeak,
  NoConvergence,
};

class DynamicsError : public Error {
 public:
  DynamicsError(DynamicsErrc code, const std::string& what,
                std::optional<double> time = std::nullopt);

  DynamicsErrc code() const noexcept { return code_; }
  /// Simulation time attached to NonFiniteState / NoConvergence (s).
  std::optional<double> time() const noexcept { return time_; }

 private:
  DynamicsErrc code_;
  std::optional<double> time_;
};

}  // namespace optomech
