#pragma once

#include <stdexcept>
#include <string>

namespace fsq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration value or unusable input file.
struct ConfigError : Error {
  using Error::Error;
};

// Argument outside its mathematical domain (negative energy, ...).
struct DomainError : Error {
  using Error::Error;
};

// Broken call contract, e.g. mismatched array lengths.
struct ContractError : Error {
  using Error::Error;
};

// Numerical blow-up during propagation; carries the position it occurred at.
struct IntegrationError : Error {
  IntegrationError(const std::string& what, double zeta_pos)
      : Error(what + " (zeta = " + std::to_string(zeta_pos) + ")"), zeta(zeta_pos) {}
  double zeta;
};

// Degenerate ensemble or other statistics failure.
struct AnalysisError : Error {
  using Error::Error;
};

// Least-squares fit failure.
struct FitError : Error {
  using Error::Error;
};

}  // namespace fsq
