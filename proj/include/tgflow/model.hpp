#pragma once

#include <optional>
#include <vector>

namespace tgflow {

/// Raw parameter set as read from a scenario, in SI units (m, s, veh/m,
/// veh/s). Defaults are the nominal freeway stretch used throughout the
/// examples and tests.
struct ModelConfig {
  double q_in = 1200.0 / 3600.0;  // veh/s
  double D = 1000.0;              // m
  double L = 5.0;                 // m
  double alpha = 0.15;
  double tau_acc = 2.0;  // s
  double tau_m = 60.0;   // s
  double h_m = 1.0;      // s
  double h_acc_bar = 1.5;
  double v_f = 27.78;  // m/s
  double h_max = 2.2;  // s
  double rho_min = 0.037;  // veh/m
  // When set, h_min is taken as given and rho_min is derived from it.
  std::optional<double> h_min;
};

/// Validated model parameters. Construction checks every invariant, so code
/// holding a ModelParams may rely on them.
class ModelParams {
 public:
  ModelParams() : ModelParams(ModelConfig{}) {}
  explicit ModelParams(const ModelConfig& config);

  double q_in() const noexcept { return q_in_; }
  double D() const noexcept { return D_; }
  double L() const noexcept { return L_; }
  double alpha() const noexcept { return alpha_; }
  double tau_acc() const noexcept { return tau_acc_; }
  double tau_m() const noexcept { return tau_m_; }
  double h_m() const noexcept { return h_m_; }
  double h_acc_bar() const noexcept { return h_acc_bar_; }
  double v_f() const noexcept { return v_f_; }
  double h_min() const noexcept { return h_min_; }
  double h_max() const noexcept { return h_max_; }
  double rho_min() const noexcept { return rho_min_; }
  double rho_jam() const noexcept { return 1.0 / L_; }
  double tau_mix() const noexcept { return tau_mix_; }

  // Upper bound on q_in for which a congested equilibrium exists for every
  // admissible time-gap.
  double max_feasible_inflow() const noexcept;

  ModelConfig config() const;

 private:
  double q_in_, D_, L_, alpha_, tau_acc_, tau_m_, h_m_, h_acc_bar_, v_f_;
  double h_min_, h_max_, rho_min_, tau_mix_;
};

struct BoundaryValues {
  double rho_in = 0.0;   // density at x = 0 (from the inflow condition)
  double v_in = 0.0;     // speed at x = 0 (extrapolated)
  double rho_out = 0.0;  // density at x = D (extrapolated)
  double v_out = 0.0;    // speed at x = D, integrated from the outlet ODE
};

/// Cell-averaged density and speed on a uniform grid at one instant.
struct TrafficState {
  std::vector<double> x;    // cell centres [m]
  std::vector<double> rho;  // [veh/m]
  std::vector<double> v;    // [m/s]
  double t = 0.0;
  BoundaryValues boundary;

  std::size_t size() const noexcept { return x.size(); }
};

struct Equilibrium {
  double rho_bar;
  double v_bar;
  double h_mix_bar;
  double h_acc_bar;
};

struct FlowBounds {
  double low;   // Q_{h_max}
  double high;  // Q_{h_min}
};

struct CharSpeeds {
  double lambda1;
  double lambda2;
};

double mixed_time_gap(double h_acc, const ModelParams& p);
double mixed_time_constant(const ModelParams& p);

// Equilibrium speed of mixed traffic; congested branch only.
double v_mix(double rho, double h_acc, const ModelParams& p);
double v_mix_drho(double rho, double h_acc, const ModelParams& p);

// Envelope of the fundamental diagrams reachable with h_acc in
// [h_min, h_max].
FlowBounds fundamental_diagram_bounds(double rho, const ModelParams& p);

CharSpeeds char_speeds(double rho, double v, double h_acc,
                       const ModelParams& p);

bool in_region_omega(double rho, double v, double h_acc,
                     const ModelParams& p);

Equilibrium equilibrium(const ModelParams& p);

// Right-hand side of the stationary speed profile ODE dv/dx.
double equilibrium_profile_ode_rhs(double v, const ModelParams& p,
                                   const Equilibrium& eq);

}  // namespace tgflow
