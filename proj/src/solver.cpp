#include "tgflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tgflow/errors.hpp"

namespace tgflow {

namespace {

double extrapolate_left(const std::vector<double>& f, Extrapolation ex) {
  if (ex == Extrapolation::Linear && f.size() > 1) return 2.0 * f[0] - f[1];
  return f.front();
}

double extrapolate_right(const std::vector<double>& f, Extrapolation ex) {
  const std::size_t n = f.size();
  if (ex == Extrapolation::Linear && n > 1) return 2.0 * f[n - 1] - f[n - 2];
  return f.back();
}

void refresh_extrapolated(TrafficState& s, const ModelParams& p,
                          Extrapolation ex) {
  s.boundary.v_in = extrapolate_left(s.v, ex);
  if (!(s.boundary.v_in > 0.0)) {
    throw BoundaryError("extrapolated inlet speed " +
                        std::to_string(s.boundary.v_in) +
                        " m/s is not positive at t=" + std::to_string(s.t) +
                        " s");
  }
  s.boundary.rho_in = p.q_in() / s.boundary.v_in;
  s.boundary.rho_out = extrapolate_right(s.rho, ex);
}

double max_char_speed(double rho, double v, double h_mix) {
  return std::max(std::abs(v), std::abs(v - 1.0 / (h_mix * rho)));
}

double total_mass(const TrafficState& s, double dx) {
  double m = 0.0;
  for (double r : s.rho) m += r;
  return m * dx;
}

void check_sizes(const TrafficState& s, const ControlField& c,
                 const Grid& g) {
  if (s.size() != g.cells || s.rho.size() != g.cells ||
      s.v.size() != g.cells || c.size() != g.cells) {
    throw std::invalid_argument("state, control and grid sizes differ");
  }
}

}  // namespace

Grid Grid::over(double D, std::size_t cells, double dt, double T) {
  if (cells < 2 || !(D > 0.0) || !(dt > 0.0) || !(T >= 0.0)) {
    throw ValidationError("grid needs at least 2 cells, D > 0, dt > 0, T >= 0");
  }
  return {cells, D / static_cast<double>(cells), dt, T};
}

std::size_t Grid::steps() const {
  return static_cast<std::size_t>(std::llround(T / dt));
}

std::vector<double> Grid::centers() const {
  std::vector<double> x(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    x[i] = (static_cast<double>(i) + 0.5) * dx;
  }
  return x;
}

double Trajectory::max_cfl() const noexcept {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.cfl);
  return m;
}

double Trajectory::max_saturation_fraction() const noexcept {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.saturation_fraction);
  return m;
}

TrafficState equilibrium_state(const ModelParams& p, const Equilibrium& eq,
                               const Grid& grid, Extrapolation ex) {
  TrafficState s;
  s.x = grid.centers();
  s.rho.assign(grid.cells, eq.rho_bar);
  s.v.assign(grid.cells, eq.v_bar);
  initialize_boundaries(s, p, ex);
  return s;
}

TrafficState cosine_state(const ModelParams& p, const Equilibrium& eq,
                          const Grid& grid, double amplitude,
                          double wavenumber, Extrapolation ex) {
  TrafficState s;
  s.x = grid.centers();
  s.rho.resize(grid.cells);
  s.v.resize(grid.cells);
  for (std::size_t i = 0; i < grid.cells; ++i) {
    s.rho[i] = eq.rho_bar + amplitude * std::cos(wavenumber * s.x[i]);
    s.v[i] = p.q_in() / s.rho[i];
  }
  initialize_boundaries(s, p, ex);
  return s;
}

void initialize_boundaries(TrafficState& state, const ModelParams& p,
                           Extrapolation ex) {
  refresh_extrapolated(state, p, ex);
  state.boundary.v_out = extrapolate_right(state.v, ex);
}

void apply_boundaries(TrafficState& state, double h_acc_outlet,
                      const ModelParams& p, const Grid& grid,
                      Extrapolation ex) {
  auto& b = state.boundary;
  b.v_out += grid.dt * (v_mix(b.rho_out, h_acc_outlet, p) - b.v_out) /
             p.tau_mix();
  refresh_extrapolated(state, p, ex);
}

double cfl_number(const TrafficState& state, const ControlField& control,
                  const ModelParams& p, const Grid& grid) {
  double a = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    a = std::max(a, max_char_speed(state.rho[i], state.v[i],
                                   mixed_time_gap(control.h_acc[i], p)));
  }
  return a * grid.dt / grid.dx;
}

TrafficState step_nonlinear(const TrafficState& state,
                            const ControlField& control, const ModelParams& p,
                            const Grid& grid, const SolverOptions& opts) {
  check_sizes(state, control, grid);
  const std::size_t n = grid.cells;
  const double dt = grid.dt;
  const double dx = grid.dx;
  const auto& b = state.boundary;

  // Extended arrays: index 0 and n + 1 are the fictitious cells.
  std::vector<double> rho(n + 2), v(n + 2), speed(n + 2), lambda2(n);
  rho[0] = b.rho_in;
  v[0] = b.v_in;
  rho[n + 1] = b.rho_out;
  v[n + 1] = b.v_out;
  double a_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i + 1] = state.rho[i];
    v[i + 1] = state.v[i];
    const double h_mix = mixed_time_gap(control.h_acc[i], p);
    lambda2[i] = v[i + 1] - 1.0 / (h_mix * rho[i + 1]);
    speed[i + 1] = std::max(std::abs(v[i + 1]), std::abs(lambda2[i]));
    a_max = std::max(a_max, speed[i + 1]);
  }
  speed[0] = max_char_speed(rho[0], v[0], mixed_time_gap(control.h_acc[0], p));
  speed[n + 1] = max_char_speed(rho[n + 1], v[n + 1],
                                mixed_time_gap(control.h_acc[n - 1], p));

  const double cfl = a_max * dt / dx;
  if (cfl > opts.cfl_max) throw CflError(cfl, opts.cfl_max, state.t);

  // Interface k sits between extended cells k and k + 1.
  std::vector<double> diffusion(n + 1), flux(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    diffusion[k] = std::max(speed[k], speed[k + 1]);
    flux[k] = 0.5 * (rho[k] * v[k] + rho[k + 1] * v[k + 1]) -
              0.5 * diffusion[k] * (rho[k + 1] - rho[k]);
  }
  flux[0] = p.q_in();
  flux[n] = b.rho_out * b.v_out;

  TrafficState next;
  next.x = state.x;
  next.t = state.t + dt;
  next.boundary = b;
  next.rho.resize(n);
  next.v.resize(n);
  const double r = dt / dx;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t e = i + 1;
    next.rho[i] = state.rho[i] - r * (flux[i + 1] - flux[i]);

    const double transport = lambda2[i] * 0.5 * (v[e + 1] - v[e - 1]);
    const double numerical = 0.5 * (diffusion[i + 1] * (v[e + 1] - v[e]) -
                                    diffusion[i] * (v[e] - v[e - 1]));
    const double source =
        (v_mix(state.rho[i], control.h_acc[i], p) - state.v[i]) / p.tau_mix();
    next.v[i] = state.v[i] + r * (numerical - transport) + dt * source;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!in_region_omega(next.rho[i], next.v[i], control.h_acc[i], p)) {
      throw RegionExitError(i, next.rho[i], next.v[i], control.h_acc[i],
                            next.t);
    }
  }
  apply_boundaries(next, control.h_acc[n - 1], p, grid, opts.extrapolation);
  return next;
}

Trajectory simulate(const ModelParams& p, const Grid& grid,
                    const TrafficState& initial, const LoopMode& mode,
                    const SolverOptions& opts) {
  if (initial.size() != grid.cells) {
    throw std::invalid_argument("initial state does not match the grid");
  }
  const Equilibrium eq = equilibrium(p);
  const LinearCoeffs lc = linear_coeffs(p, eq);
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);

  auto control_for = [&](const TrafficState& s) {
    if (const auto* closed = std::get_if<ClosedLoop>(&mode)) {
      return feedback_law(s, eq, lc, closed->gain, p);
    }
    return ControlField::uniform(grid.cells, p.h_acc_bar());
  };

  TrafficState state = initial;
  ControlField control = control_for(state);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!in_region_omega(state.rho[i], state.v[i], control.h_acc[i], p)) {
      throw RegionExitError(i, state.rho[i], state.v[i], control.h_acc[i],
                            state.t);
    }
  }

  Trajectory traj;
  traj.grid = grid;
  const std::size_t steps = grid.steps();
  const std::size_t samples = steps / every + 1;
  traj.times.reserve(samples);
  traj.states.reserve(samples);
  traj.controls.reserve(samples);
  traj.diagnostics.reserve(samples);

  for (std::size_t step = 0;; ++step) {
    if (step % every == 0) {
      traj.times.push_back(state.t);
      traj.diagnostics.push_back({cfl_number(state, control, p, grid),
                                  total_mass(state, grid.dx),
                                  control.saturation_fraction()});
      traj.states.push_back(state);
      traj.controls.push_back(control);
    }
    if (step == steps) break;
    state = step_nonlinear(state, control, p, grid, opts);
    // Keep the clock free of accumulated round-off.
    state.t = static_cast<double>(step + 1) * grid.dt;
    control = control_for(state);
  }
  return traj;
}

LinearTrajectory simulate_linear(const LinearCoeffs& lc, const Equilibrium& eq,
                                 const NodeGrid& grid, double dt, double T,
                                 DeviationField initial,
                                 std::optional<double> feedback_gain,
                                 std::size_t record_every) {
  const std::size_t n = grid.nodes();
  if (initial.rho.size() != n || initial.v.size() != n) {
    throw std::invalid_argument("simulate_linear: initial field size mismatch");
  }
  const double cfl = std::max(eq.v_bar, lc.c4) * dt / grid.dx;
  if (cfl > 1.0) throw CflError(cfl, 1.0, 0.0);
  if (feedback_gain && lc.c3 == 0.0) {
    throw NoAuthorityError("linear feedback needs alpha > 0");
  }

  const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
  const std::size_t every = std::max<std::size_t>(1, record_every);
  LinearTrajectory traj;
  traj.grid = grid;
  traj.dt = dt;

  DeviationField s = std::move(initial);
  std::vector<double> h_dev(n, 0.0);
  for (std::size_t step = 0;; ++step) {
    if (step % every == 0) {
      traj.times.push_back(static_cast<double>(step) * dt);
      traj.states.push_back(s);
    }
    if (step == steps) break;
    if (feedback_gain) {
      for (std::size_t j = 0; j < n; ++j) {
        h_dev[j] = feedback_time_gap_deviation(s.rho[j], s.v[j], lc,
                                               *feedback_gain);
      }
    }
    const DeviationField rate = linearized_rhs(s.rho, s.v, h_dev, lc, eq, grid);
    for (std::size_t j = 0; j < n; ++j) {
      s.rho[j] += dt * rate.rho[j];
      s.v[j] += dt * rate.v[j];
    }
    s.rho[0] = -lc.c5 * s.v[0];
  }
  return traj;
}

SpeedSubsystemRun simulate_linear_speed_subsystem(
    ControlGain gain, const LinearCoeffs& lc, const NodeGrid& grid, double dt,
    double x1, std::span<const double> input, std::size_t steps) {
  const double position = x1 / grid.dx;
  const auto j1 = static_cast<std::size_t>(std::llround(position));
  if (x1 < 0.0 || j1 > grid.intervals ||
      std::abs(position - static_cast<double>(j1)) > 1e-9 * (1.0 + position)) {
    throw std::invalid_argument("input location must be a grid node in [0, D]");
  }
  const double nu = lc.c4 * dt / grid.dx;
  if (nu > 1.0) throw CflError(nu, 1.0, 0.0);

  const double decay = std::exp(-gain.value() * dt);
  auto signal = [&](std::size_t n) { return n < input.size() ? input[n] : 0.0; };

  SpeedSubsystemRun run;
  run.grid = grid;
  run.dt = dt;
  run.input_node = j1;
  run.times.reserve(steps + 1);
  run.field.reserve(steps + 1);

  std::vector<double> u(j1 + 1, 0.0);
  u[j1] = signal(0);
  run.times.push_back(0.0);
  run.field.push_back(u);
  std::vector<double> next(u.size());
  for (std::size_t n = 1; n <= steps; ++n) {
    for (std::size_t j = 0; j < j1; ++j) {
      next[j] = decay * (u[j] + nu * (u[j + 1] - u[j]));
    }
    next[j1] = signal(n);
    u.swap(next);
    run.times.push_back(static_cast<double>(n) * dt);
    run.field.push_back(u);
  }
  return run;
}

}  // namespace tgflow
