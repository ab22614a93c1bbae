#pragma once

#include <stdexcept>
#include <string>

namespace susylame {

/// Argument outside the mathematical domain of an operation (m ∉ [0,1], j < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed form not available for the requested (j, n, family); use the numerical pipeline.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integrator failure, non-converged iteration, or a nodal ground state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer band edges were found below the energy ceiling than were requested.
class IncompleteSpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace susylame
