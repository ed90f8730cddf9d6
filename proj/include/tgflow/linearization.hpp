#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tgflow/model.hpp"

namespace tgflow {

/// Coefficients of the system linearized around a uniform congested
/// equilibrium, plus the constants entering its characteristic function.
struct LinearCoeffs {
  double c1;  // density -> speed coupling
  double c2;  // 1 / tau_mix
  double c3;  // control authority of h_acc on the speed equation
  double c4;  // upstream transport speed of speed perturbations, L / h_mix
  double c5;  // rho_bar / v_bar, inflow boundary coupling
  double a1;
  double a2;
  double tau_char;  // 1/c4 + 1/v_bar
};

LinearCoeffs linear_coeffs(const ModelParams& p, const Equilibrium& eq);

/// Uniform nodal grid on [0, length] with nodes x_j = j * dx, j = 0..intervals.
/// The linear analysis works on nodes because its boundary conditions and
/// integrals sit exactly at x = 0 and x = D.
struct NodeGrid {
  std::size_t intervals = 100;
  double dx = 10.0;

  static NodeGrid over(double length, std::size_t intervals);
  std::size_t nodes() const noexcept { return intervals + 1; }
  double length() const noexcept { return dx * static_cast<double>(intervals); }
  double x(std::size_t j) const noexcept { return dx * static_cast<double>(j); }
  std::vector<double> coordinates() const;
};

/// Deviations from the equilibrium, (rho - rho_bar, v - v_bar).
struct DeviationField {
  std::vector<double> rho;
  std::vector<double> v;
};

DeviationField deviations(const TrafficState& state, const Equilibrium& eq);

// z = exp(c2 x / v_bar) * (rho_dev + h_mix_bar rho_bar^2 v_dev), cellwise.
std::vector<double> to_riemann(std::span<const double> x,
                               std::span<const double> rho_dev,
                               std::span<const double> v_dev,
                               const Equilibrium& eq, const LinearCoeffs& lc);
std::vector<double> to_riemann(const TrafficState& state,
                               const Equilibrium& eq, const LinearCoeffs& lc);

DeviationField from_riemann(std::span<const double> x,
                            std::span<const double> z,
                            std::span<const double> v_dev,
                            const Equilibrium& eq, const LinearCoeffs& lc);

/// Time derivatives of the linearized system on a node grid.
///
/// Interior transport terms are upwinded along the characteristic families:
/// the downstream-moving combination rho + h_mix rho^2 v uses a backward
/// difference and the upstream-moving speed uses a forward difference. Node 0
/// carries the time derivative of the algebraic inflow condition
/// rho(0) + c5 v(0) = 0, node N carries the outlet speed ODE.
DeviationField linearized_rhs(std::span<const double> rho_dev,
                              std::span<const double> v_dev,
                              std::span<const double> h_acc_dev,
                              const LinearCoeffs& lc, const Equilibrium& eq,
                              const NodeGrid& grid);

}  // namespace tgflow
