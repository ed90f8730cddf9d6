#include "tgflow/linearization.hpp"

#include <cmath>
#include <stdexcept>

namespace tgflow {

LinearCoeffs linear_coeffs(const ModelParams& p, const Equilibrium& eq) {
  const double rho = eq.rho_bar;
  const double v = eq.v_bar;
  const double h_mix = eq.h_mix_bar;
  const double tau_mix = p.tau_mix();

  LinearCoeffs lc{};
  lc.c1 = 1.0 / (rho * rho * tau_mix * h_mix);
  lc.c2 = 1.0 / tau_mix;
  lc.c3 = p.alpha() / (p.tau_acc() * eq.h_acc_bar * eq.h_acc_bar) *
          (1.0 / rho - p.L());
  lc.c4 = p.L() / h_mix;
  lc.c5 = rho / v;
  lc.tau_char = 1.0 / lc.c4 + 1.0 / v;
  lc.a1 = lc.c4 * lc.c1 * std::exp(-lc.c2 * p.D() / v) / v;
  lc.a2 = v * lc.c1 * tau_mix * lc.tau_char;
  return lc;
}

NodeGrid NodeGrid::over(double length, std::size_t intervals) {
  if (intervals == 0 || !(length > 0.0)) {
    throw std::invalid_argument("NodeGrid needs a positive length and intervals");
  }
  return {intervals, length / static_cast<double>(intervals)};
}

std::vector<double> NodeGrid::coordinates() const {
  std::vector<double> xs(nodes());
  for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = x(j);
  return xs;
}

DeviationField deviations(const TrafficState& state, const Equilibrium& eq) {
  DeviationField d{state.rho, state.v};
  for (auto& r : d.rho) r -= eq.rho_bar;
  for (auto& s : d.v) s -= eq.v_bar;
  return d;
}

std::vector<double> to_riemann(std::span<const double> x,
                               std::span<const double> rho_dev,
                               std::span<const double> v_dev,
                               const Equilibrium& eq, const LinearCoeffs& lc) {
  const double w = eq.h_mix_bar * eq.rho_bar * eq.rho_bar;
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = std::exp(lc.c2 * x[i] / eq.v_bar) * (rho_dev[i] + w * v_dev[i]);
  }
  return z;
}

std::vector<double> to_riemann(const TrafficState& state,
                               const Equilibrium& eq, const LinearCoeffs& lc) {
  const auto d = deviations(state, eq);
  return to_riemann(state.x, d.rho, d.v, eq, lc);
}

DeviationField from_riemann(std::span<const double> x,
                            std::span<const double> z,
                            std::span<const double> v_dev,
                            const Equilibrium& eq, const LinearCoeffs& lc) {
  const double w = eq.h_mix_bar * eq.rho_bar * eq.rho_bar;
  DeviationField d{std::vector<double>(x.size()),
                   std::vector<double>(v_dev.begin(), v_dev.end())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.rho[i] = std::exp(-lc.c2 * x[i] / eq.v_bar) * z[i] - w * v_dev[i];
  }
  return d;
}

DeviationField linearized_rhs(std::span<const double> rho_dev,
                              std::span<const double> v_dev,
                              std::span<const double> h_acc_dev,
                              const LinearCoeffs& lc, const Equilibrium& eq,
                              const NodeGrid& grid) {
  const std::size_t n = grid.nodes();
  if (rho_dev.size() != n || v_dev.size() != n || h_acc_dev.size() != n) {
    throw std::invalid_argument("linearized_rhs: field sizes must match the grid");
  }
  const double w = eq.h_mix_bar * eq.rho_bar * eq.rho_bar;
  // rho_bar = v_bar * w + L rho_bar^2 and L rho_bar^2 = w * c4.
  const double upstream_weight = w * lc.c4;

  DeviationField rate{std::vector<double>(n), std::vector<double>(n)};
  auto riemann = [&](std::size_t j) { return rho_dev[j] + w * v_dev[j]; };

  for (std::size_t j = 0; j < n; ++j) {
    const double source =
        -lc.c1 * rho_dev[j] - lc.c2 * v_dev[j] - lc.c3 * h_acc_dev[j];
    if (j + 1 < n) {
      const double v_x = (v_dev[j + 1] - v_dev[j]) / grid.dx;
      rate.v[j] = lc.c4 * v_x + source;
    } else {
      rate.v[j] = source;
    }
  }
  for (std::size_t j = 1; j < n; ++j) {
    const double riemann_x = (riemann(j) - riemann(j - 1)) / grid.dx;
    const double v_x = j + 1 < n ? (v_dev[j + 1] - v_dev[j]) / grid.dx
                                 : (v_dev[j] - v_dev[j - 1]) / grid.dx;
    rate.rho[j] = -eq.v_bar * riemann_x - upstream_weight * v_x;
  }
  rate.rho[0] = -lc.c5 * rate.v[0];
  return rate;
}

}  // namespace tgflow
