#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "tgflow/solver.hpp"

namespace support {

inline double sup_speed_dev(const tgflow::TrafficState& s, double v_bar) {
  double m = 0.0;
  for (double v : s.v) m = std::max(m, std::abs(v - v_bar));
  return m;
}

struct ConvergenceStudy {
  std::vector<std::size_t> cells;
  std::vector<double> errors;  // L1 distance to the reference, per level
  std::vector<double> orders;  // log2(e_n / e_{n+1})
};

/// Open-loop cosine run to time T on successively halved grids (dt
/// proportional to dx), compared with a fine reference restricted by cell
/// averaging.
inline ConvergenceStudy self_convergence(const tgflow::ModelParams& p, double T,
                                         std::vector<std::size_t> levels,
                                         std::size_t reference_cells) {
  using namespace tgflow;
  const Equilibrium eq = equilibrium(p);
  const double k = 8.0 * std::numbers::pi / p.D();
  auto run = [&](std::size_t cells) {
    const Grid g = Grid::over(p.D(), cells, 0.1 * 100.0 / static_cast<double>(cells), T);
    SolverOptions opts;
    opts.record_every = g.steps();
    const auto traj = simulate(p, g, cosine_state(p, eq, g, 0.01, k), OpenLoop{}, opts);
    return traj.states.back();
  };
  const TrafficState ref = run(reference_cells);
  ConvergenceStudy out;
  out.cells = levels;
  for (std::size_t cells : levels) {
    const TrafficState s = run(cells);
    const std::size_t ratio = reference_cells / cells;
    double err = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      double r = 0.0, v = 0.0;
      for (std::size_t j = 0; j < ratio; ++j) {
        r += ref.rho[i * ratio + j];
        v += ref.v[i * ratio + j];
      }
      r /= static_cast<double>(ratio);
      v /= static_cast<double>(ratio);
      err += (std::abs(s.rho[i] - r) / eq.rho_bar + std::abs(s.v[i] - v) / eq.v_bar) *
             (p.D() / static_cast<double>(cells));
    }
    out.errors.push_back(err);
  }
  for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
    out.orders.push_back(std::log2(out.errors[i] / out.errors[i + 1]));
  }
  return out;
}

}  // namespace support
