#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tgflow/solver.hpp"

namespace tgflow {

/// Coefficients of the instantaneous fuel rate
/// max{0, b0 + b1 v + b3 v^3 + b4 v a} per vehicle, SI inputs.
///
/// Defaults come from a tractive-power model of a 1500 kg passenger car:
/// idle power 3 kW, rolling resistance 0.015, drag area 0.65 m^2 * 0.5 rho_air,
/// and 0.3 l of fuel per 3.6 MJ of wheel work. Output is litres per second.
struct FuelCoeffs {
  double b0 = 3000.0 * kLitresPerJoule;
  double b1 = 0.015 * 1500.0 * 9.81 * kLitresPerJoule;
  double b3 = 0.5 * 1.2 * 0.65 * kLitresPerJoule;
  double b4 = 1500.0 * kLitresPerJoule;
  std::string units = "l/s";

  static constexpr double kLitresPerJoule = 0.3 / 3.6e6;

  // Throws ConfigError on a non-finite coefficient.
  void validate() const;
};

struct AccelerationField {
  std::vector<std::vector<double>> a;    // a[n][i] [m/s^2]
  std::vector<std::vector<double>> a_t;  // a_t[n][i] [m/s^3]
};

/// Material acceleration a = v_t + v v_x by central differences in t and x
/// (one-sided at the edges), and a_t by differencing a in time. Needs at
/// least three samples on a uniform time axis.
AccelerationField acceleration_field(const Trajectory& traj);

// Space-time integral of a cell field f[n][i]: trapezoid in time, and in
// space over [0, D] with the end cells held constant out to the boundary.
double space_time_integral(const Trajectory& traj,
                           const std::vector<std::vector<double>>& f);

double fuel_index(const Trajectory& traj, const AccelerationField& acc,
                  const FuelCoeffs& coeffs);
double fuel_index(const Trajectory& traj, const FuelCoeffs& coeffs);

double comfort_index(const Trajectory& traj, const AccelerationField& acc);
double comfort_index(const Trajectory& traj);

double ttt_index(const Trajectory& traj);

struct MetricSet {
  double fuel = 0.0;
  double comfort = 0.0;
  double ttt = 0.0;
};

struct MetricsReport {
  MetricSet open;
  MetricSet closed;
  MetricSet improvement_pct;
  std::string fuel_units;
  // Placeholder for the discretized-model fuel metric, which is not computed.
  std::optional<double> fuel2_improvement_pct;
};

MetricSet evaluate(const Trajectory& traj, const FuelCoeffs& coeffs);

// (open - closed) / open * 100, or 0 when both are 0.
double improvement_pct(double open, double closed);

/// Both trajectories must share cell count, dx, and time samples.
MetricsReport compare(const Trajectory& open, const Trajectory& closed,
                      const FuelCoeffs& coeffs);

}  // namespace tgflow
