#include "tgflow/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgflow/errors.hpp"

namespace tgflow {

ControlGain::ControlGain(double k) : k_(k) {
  if (!(std::isfinite(k) && k > 0.0)) {
    throw ValidationError("feedback gain must be positive, got " +
                          std::to_string(k));
  }
}

ControlField ControlField::uniform(std::size_t cells, double h_acc) {
  return {std::vector<double>(cells, h_acc),
          std::vector<std::uint8_t>(cells, 0)};
}

double ControlField::saturation_fraction() const noexcept {
  if (saturated.empty()) return 0.0;
  const auto n = std::count(saturated.begin(), saturated.end(), 1);
  return static_cast<double>(n) / static_cast<double>(saturated.size());
}

double feedback_time_gap_deviation(double rho_dev, double v_dev,
                                   const LinearCoeffs& lc, double k) {
  return (-lc.c1 * rho_dev + (k - lc.c2) * v_dev) / lc.c3;
}

ControlField feedback_law(const TrafficState& state, const Equilibrium& eq,
                          const LinearCoeffs& lc, ControlGain gain,
                          const ModelParams& p) {
  if (lc.c3 == 0.0) {
    throw NoAuthorityError(
        "feedback law needs ACC vehicles (alpha > 0) to act on");
  }
  const std::size_t n = state.size();
  ControlField field{std::vector<double>(n), std::vector<std::uint8_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double h =
        eq.h_acc_bar + feedback_time_gap_deviation(state.rho[i] - eq.rho_bar,
                                                   state.v[i] - eq.v_bar, lc,
                                                   gain.value());
    const double clamped = std::clamp(h, p.h_min(), p.h_max());
    field.h_acc[i] = clamped;
    field.saturated[i] = clamped != h ? 1 : 0;
  }
  return field;
}

std::vector<double> closed_loop_source(const TrafficState& state,
                                       const ControlField& control,
                                       const ModelParams& p) {
  std::vector<double> s(state.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = (v_mix(state.rho[i], control.h_acc[i], p) - state.v[i]) /
           p.tau_mix();
  }
  return s;
}

}  // namespace tgflow
