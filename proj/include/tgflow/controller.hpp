#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tgflow/linearization.hpp"
#include "tgflow/model.hpp"

namespace tgflow {

class ControlGain {
 public:
  explicit ControlGain(double k);
  double value() const noexcept { return k_; }

 private:
  double k_;
};

/// Time-gap applied to ACC vehicles in each cell.
struct ControlField {
  std::vector<double> h_acc;
  std::vector<std::uint8_t> saturated;

  static ControlField uniform(std::size_t cells, double h_acc);
  std::size_t size() const noexcept { return h_acc.size(); }
  double saturation_fraction() const noexcept;
};

// h_acc = h_acc_bar + (-c1 rho_dev + (k - c2) v_dev) / c3, clamped to
// [h_min, h_max]. Throws NoAuthorityError when c3 == 0.
ControlField feedback_law(const TrafficState& state, const Equilibrium& eq,
                          const LinearCoeffs& lc, ControlGain gain,
                          const ModelParams& p);

// Unclamped law on deviation values, used by the linear analysis.
double feedback_time_gap_deviation(double rho_dev, double v_dev,
                                   const LinearCoeffs& lc, double k);

/// Relaxation term (V_mix(rho, h_acc) - v) / tau_mix per cell.
std::vector<double> closed_loop_source(const TrafficState& state,
                                       const ControlField& control,
                                       const ModelParams& p);

}  // namespace tgflow
