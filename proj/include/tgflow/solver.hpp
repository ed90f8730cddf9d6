#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tgflow/controller.hpp"
#include "tgflow/linearization.hpp"
#include "tgflow/model.hpp"

namespace tgflow {

/// Uniform finite-volume grid with N cells of width dx covering [0, D].
struct Grid {
  std::size_t cells = 100;
  double dx = 10.0;
  double dt = 0.1;
  double T = 350.0;

  static Grid over(double D, std::size_t cells, double dt, double T);
  std::size_t steps() const;
  double length() const noexcept { return dx * static_cast<double>(cells); }
  std::vector<double> centers() const;
};

// How the fictitious cells beyond each end are filled from the interior.
enum class Extrapolation { Constant, Linear };

struct SolverOptions {
  double cfl_max = 0.9;
  Extrapolation extrapolation = Extrapolation::Constant;
  std::size_t record_every = 1;
};

struct StepDiagnostics {
  double cfl = 0.0;
  double mass = 0.0;  // sum(rho) * dx [veh]
  double saturation_fraction = 0.0;
};

struct Trajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<TrafficState> states;
  std::vector<ControlField> controls;
  std::vector<StepDiagnostics> diagnostics;

  std::size_t size() const noexcept { return states.size(); }
  double max_cfl() const noexcept;
  double max_saturation_fraction() const noexcept;
};

struct OpenLoop {};
struct ClosedLoop {
  ControlGain gain;
};
using LoopMode = std::variant<OpenLoop, ClosedLoop>;

TrafficState equilibrium_state(const ModelParams& p, const Equilibrium& eq,
                               const Grid& grid,
                               Extrapolation ex = Extrapolation::Constant);

// rho(x, 0) = rho_bar + amplitude * cos(wavenumber * x), v = q_in / rho.
TrafficState cosine_state(const ModelParams& p, const Equilibrium& eq,
                          const Grid& grid, double amplitude,
                          double wavenumber,
                          Extrapolation ex = Extrapolation::Constant);

// Fills every fictitious-cell value from the interior, including the outlet
// speed. Used once on an initial condition.
void initialize_boundaries(TrafficState& state, const ModelParams& p,
                           Extrapolation ex = Extrapolation::Constant);

// Advances the outlet speed by one forward-Euler step of its relaxation ODE
// (using the stored outlet density), then refreshes the extrapolated values
// and the inflow density from the current interior.
void apply_boundaries(TrafficState& state, double h_acc_outlet,
                      const ModelParams& p, const Grid& grid,
                      Extrapolation ex = Extrapolation::Constant);

double cfl_number(const TrafficState& state, const ControlField& control,
                  const ModelParams& p, const Grid& grid);

/// One explicit step of the nonlinear model. Density is updated in
/// conservative form with a Rusanov flux, speed in quasilinear form with a
/// centred derivative plus the same interface diffusion, and the relaxation
/// source is added explicitly.
TrafficState step_nonlinear(const TrafficState& state,
                            const ControlField& control, const ModelParams& p,
                            const Grid& grid, const SolverOptions& opts = {});

Trajectory simulate(const ModelParams& p, const Grid& grid,
                    const TrafficState& initial, const LoopMode& mode,
                    const SolverOptions& opts = {});

// --- linear subsystems -----------------------------------------------------

struct LinearTrajectory {
  NodeGrid grid;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<DeviationField> states;
};

/// Forward-Euler integration of the linearized model on a node grid, either
/// open-loop (no time-gap deviation) or under the unsaturated feedback law
/// with gain `feedback_gain`. The gain sign is not checked here so that
/// destabilizing gains can be studied.
LinearTrajectory simulate_linear(const LinearCoeffs& lc, const Equilibrium& eq,
                                 const NodeGrid& grid, double dt, double T,
                                 DeviationField initial,
                                 std::optional<double> feedback_gain,
                                 std::size_t record_every = 1);

struct SpeedSubsystemRun {
  NodeGrid grid;  // nodes 0..input_node are simulated
  double dt = 0.0;
  std::size_t input_node = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> field;  // field[n][j] = v_dev(x_j, t_n)
};

/// Closed-loop speed subsystem v_t - c4 v_x = -k v on [0, x1] driven by the
/// boundary signal v(x1, t_n) = input[n] (zero after the signal ends).
/// Transport is upwinded; the damping is integrated exactly over each step.
SpeedSubsystemRun simulate_linear_speed_subsystem(
    ControlGain gain, const LinearCoeffs& lc, const NodeGrid& grid, double dt,
    double x1, std::span<const double> input, std::size_t steps);

}  // namespace tgflow
