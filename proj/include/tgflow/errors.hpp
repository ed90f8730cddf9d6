#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tgflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a model relation (e.g. density beyond jam).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Parameter set violating a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inflow too large for a congested equilibrium to exist.
class InfeasibleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Scenario file could not be parsed.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Feedback requested with no ACC vehicles to actuate (alpha == 0).
class NoAuthorityError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class CflError : public SolverError {
 public:
  CflError(double cfl, double cfl_max, double t)
      : SolverError("CFL number " + std::to_string(cfl) + " exceeds " +
                    std::to_string(cfl_max) + " at t=" + std::to_string(t) +
                    " s"),
        cfl_(cfl) {}
  double cfl() const noexcept { return cfl_; }

 private:
  double cfl_;
};

class BoundaryError : public SolverError {
 public:
  using SolverError::SolverError;
};

// The state left the congested admissible region where the model is valid.
class RegionExitError : public SolverError {
 public:
  RegionExitError(std::size_t cell, double rho, double v, double h_acc,
                  double t)
      : SolverError("state left the congested region at cell " +
                    std::to_string(cell) + " (rho=" + std::to_string(rho) +
                    " veh/m, v=" + std::to_string(v) +
                    " m/s, h_acc=" + std::to_string(h_acc) +
                    " s, t=" + std::to_string(t) + " s)"),
        cell_(cell),
        rho_(rho),
        v_(v),
        h_acc_(h_acc) {}

  std::size_t cell() const noexcept { return cell_; }
  double rho() const noexcept { return rho_; }
  double v() const noexcept { return v_; }
  double h_acc() const noexcept { return h_acc_; }

 private:
  std::size_t cell_;
  double rho_;
  double v_;
  double h_acc_;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace tgflow
