#include "tgflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tgflow/errors.hpp"
#include "tgflow/numerics.hpp"

namespace tgflow {

namespace {

using Field = std::vector<std::vector<double>>;

// Derivative along the sample axis with possibly uneven spacing.
double time_diff(const std::vector<double>& t, const Field& f, std::size_t n,
                 std::size_t i) {
  const std::size_t last = t.size() - 1;
  if (n == 0) return (f[1][i] - f[0][i]) / (t[1] - t[0]);
  if (n == last) return (f[last][i] - f[last - 1][i]) / (t[last] - t[last - 1]);
  return (f[n + 1][i] - f[n - 1][i]) / (t[n + 1] - t[n - 1]);
}

double space_integral(std::span<const double> f, double dx) {
  // Trapezoid over the cell centres plus half a cell at each end.
  double s = 0.0;
  for (double v : f) s += v;
  return s * dx;
}

}  // namespace

void FuelCoeffs::validate() const {
  for (double b : {b0, b1, b3, b4}) {
    if (!std::isfinite(b)) throw ConfigError("fuel coefficients must be finite");
  }
}

AccelerationField acceleration_field(const Trajectory& traj) {
  const std::size_t ns = traj.size();
  if (ns < 3) {
    throw std::invalid_argument(
        "acceleration_field needs at least three time samples");
  }
  const std::size_t nc = traj.grid.cells;
  Field v(ns);
  for (std::size_t n = 0; n < ns; ++n) v[n] = traj.states[n].v;

  AccelerationField acc;
  acc.a.assign(ns, std::vector<double>(nc, 0.0));
  acc.a_t.assign(ns, std::vector<double>(nc, 0.0));
  for (std::size_t n = 0; n < ns; ++n) {
    const auto v_x = numerics::gradient(v[n], traj.grid.dx);
    for (std::size_t i = 0; i < nc; ++i) {
      acc.a[n][i] = time_diff(traj.times, v, n, i) + v[n][i] * v_x[i];
    }
  }
  for (std::size_t n = 0; n < ns; ++n) {
    for (std::size_t i = 0; i < nc; ++i) {
      acc.a_t[n][i] = time_diff(traj.times, acc.a, n, i);
    }
  }
  return acc;
}

double space_time_integral(const Trajectory& traj, const Field& f) {
  if (f.size() != traj.size()) {
    throw std::invalid_argument("space_time_integral: sample count mismatch");
  }
  std::vector<double> per_time(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    per_time[n] = space_integral(f[n], traj.grid.dx);
  }
  return numerics::trapezoid(traj.times, per_time);
}

double fuel_index(const Trajectory& traj, const AccelerationField& acc,
                  const FuelCoeffs& c) {
  c.validate();
  Field f(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const auto& s = traj.states[n];
    f[n].resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double v = s.v[i];
      const double a = acc.a[n][i];
      const double rate = c.b0 + c.b1 * v + c.b3 * v * v * v + c.b4 * v * a;
      f[n][i] = std::max(0.0, rate) * s.rho[i];
    }
  }
  return space_time_integral(traj, f);
}

double fuel_index(const Trajectory& traj, const FuelCoeffs& coeffs) {
  return fuel_index(traj, acceleration_field(traj), coeffs);
}

double comfort_index(const Trajectory& traj, const AccelerationField& acc) {
  Field f(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const auto& s = traj.states[n];
    f[n].resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double a = acc.a[n][i];
      const double a_t = acc.a_t[n][i];
      f[n][i] = (a * a + a_t * a_t) * s.rho[i];
    }
  }
  return space_time_integral(traj, f);
}

double comfort_index(const Trajectory& traj) {
  return comfort_index(traj, acceleration_field(traj));
}

double ttt_index(const Trajectory& traj) {
  Field f(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) f[n] = traj.states[n].rho;
  return space_time_integral(traj, f);
}

MetricSet evaluate(const Trajectory& traj, const FuelCoeffs& coeffs) {
  const AccelerationField acc = acceleration_field(traj);
  return {fuel_index(traj, acc, coeffs), comfort_index(traj, acc),
          ttt_index(traj)};
}

double improvement_pct(double open, double closed) {
  if (open == 0.0 && closed == 0.0) return 0.0;
  return (open - closed) / open * 100.0;
}

MetricsReport compare(const Trajectory& open, const Trajectory& closed,
                      const FuelCoeffs& coeffs) {
  const bool same_grid = open.grid.cells == closed.grid.cells &&
                         open.grid.dx == closed.grid.dx &&
                         open.times == closed.times;
  if (!same_grid) {
    throw ValidationError(
        "compare: trajectories must share grid and time samples");
  }
  MetricsReport r;
  r.open = evaluate(open, coeffs);
  r.closed = evaluate(closed, coeffs);
  r.improvement_pct = {improvement_pct(r.open.fuel, r.closed.fuel),
                       improvement_pct(r.open.comfort, r.closed.comfort),
                       improvement_pct(r.open.ttt, r.closed.ttt)};
  r.fuel_units = coeffs.units;
  return r;
}

}  // namespace tgflow
