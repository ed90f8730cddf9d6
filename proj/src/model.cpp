#include "tgflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "tgflow/errors.hpp"

namespace tgflow {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("invalid model parameters: " + what);
}

double mixed_gap(double h_acc, double alpha, double tau_acc, double tau_m,
                 double h_m) {
  const double r = (1.0 - alpha) * tau_acc / tau_m;
  return (alpha + r) / (alpha + r * h_acc / h_m) * h_acc;
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& c)
    : q_in_(c.q_in),
      D_(c.D),
      L_(c.L),
      alpha_(c.alpha),
      tau_acc_(c.tau_acc),
      tau_m_(c.tau_m),
      h_m_(c.h_m),
      h_acc_bar_(c.h_acc_bar),
      v_f_(c.v_f),
      h_max_(c.h_max) {
  require(std::isfinite(L_) && L_ > 0.0, "L must be positive");
  require(std::isfinite(D_) && D_ > 0.0, "D must be positive");
  require(alpha_ >= 0.0 && alpha_ <= 1.0, "alpha must lie in [0, 1]");
  require(std::isfinite(tau_acc_) && tau_acc_ > 0.0,
          "tau_acc must be positive");
  require(std::isfinite(tau_m_) && tau_m_ > 0.0, "tau_m must be positive");
  require(std::isfinite(v_f_) && v_f_ > 0.0, "v_f must be positive");
  require(h_m_ > 0.0 && h_acc_bar_ > 0.0, "time-gaps must be positive");

  if (c.h_min) {
    h_min_ = *c.h_min;
    require(h_min_ > 0.0, "h_min must be positive");
    rho_min_ = 1.0 / (L_ + v_f_ * h_min_);
  } else {
    rho_min_ = c.rho_min;
    require(rho_min_ > 0.0 && rho_min_ < 1.0 / L_,
            "rho_min must lie in (0, 1/L)");
    h_min_ = (1.0 / rho_min_ - L_) / v_f_;
  }
  require(h_max_ >= h_min_, "h_max must not be below h_min");
  require(h_min_ <= h_acc_bar_ && h_acc_bar_ <= h_max_,
          "h_acc_bar must lie in [h_min, h_max]");
  require(h_min_ <= h_m_ && h_m_ <= h_max_, "h_m must lie in [h_min, h_max]");

  tau_mix_ = 1.0 / (alpha_ / tau_acc_ + (1.0 - alpha_) / tau_m_);

  if (!(q_in_ > 0.0 && q_in_ < max_feasible_inflow())) {
    std::ostringstream os;
    os << "inflow q_in=" << q_in_ << " veh/s violates the feasibility bound 0 < q_in < "
       << max_feasible_inflow() << " veh/s";
    throw InfeasibleError(os.str());
  }
}

double ModelParams::max_feasible_inflow() const noexcept {
  return v_f_ * h_min_ / (h_max_ * (L_ + v_f_ * h_min_));
}

ModelConfig ModelParams::config() const {
  ModelConfig c;
  c.q_in = q_in_;
  c.D = D_;
  c.L = L_;
  c.alpha = alpha_;
  c.tau_acc = tau_acc_;
  c.tau_m = tau_m_;
  c.h_m = h_m_;
  c.h_acc_bar = h_acc_bar_;
  c.v_f = v_f_;
  c.h_max = h_max_;
  c.rho_min = rho_min_;
  c.h_min = h_min_;
  return c;
}

double mixed_time_gap(double h_acc, const ModelParams& p) {
  if (!(h_acc > 0.0)) {
    throw DomainError("mixed_time_gap: h_acc must be positive, got " +
                      std::to_string(h_acc));
  }
  return mixed_gap(h_acc, p.alpha(), p.tau_acc(), p.tau_m(), p.h_m());
}

double mixed_time_constant(const ModelParams& p) {
  return 1.0 / (p.alpha() / p.tau_acc() + (1.0 - p.alpha()) / p.tau_m());
}

double v_mix(double rho, double h_acc, const ModelParams& p) {
  if (!(rho > p.rho_min() && rho < p.rho_jam())) {
    throw DomainError("v_mix: density " + std::to_string(rho) +
                      " veh/m outside the congested range (rho_min, 1/L)");
  }
  return (1.0 / rho - p.L()) / mixed_time_gap(h_acc, p);
}

double v_mix_drho(double rho, double h_acc, const ModelParams& p) {
  return -1.0 / (mixed_time_gap(h_acc, p) * rho * rho);
}

FlowBounds fundamental_diagram_bounds(double rho, const ModelParams& p) {
  if (!(rho >= 0.0 && rho <= p.rho_jam())) {
    throw DomainError("fundamental_diagram_bounds: density " +
                      std::to_string(rho) + " veh/m outside [0, 1/L]");
  }
  // Critical density of the h_max diagram.
  const double rho_min_hmax = 1.0 / (p.L() + p.v_f() * p.h_max());
  const double high = rho <= p.rho_min()
                          ? p.v_f() * rho
                          : (1.0 - p.L() * rho) / p.h_min();
  const double low = rho <= rho_min_hmax ? p.v_f() * rho
                                         : (1.0 - p.L() * rho) / p.h_max();
  return {low, high};
}

CharSpeeds char_speeds(double rho, double v, double h_acc,
                       const ModelParams& p) {
  return {v, v - 1.0 / (mixed_time_gap(h_acc, p) * rho)};
}

bool in_region_omega(double rho, double v, double h_acc,
                     const ModelParams& p) {
  if (!(rho > p.rho_min() && rho < p.rho_jam())) return false;
  if (!(v > 0.0 && v < p.v_f())) return false;
  if (!(h_acc >= p.h_min() && h_acc <= p.h_max())) return false;
  return v + rho * v_mix_drho(rho, h_acc, p) < 0.0;
}

Equilibrium equilibrium(const ModelParams& p) {
  const double h_mix = mixed_time_gap(p.h_acc_bar(), p);
  const double headway = 1.0 / p.q_in() - h_mix;
  if (!(headway > 0.0)) {
    throw InfeasibleError(
        "no congested equilibrium: 1/q_in must exceed the mixed time-gap");
  }
  const double v_bar = p.L() / headway;
  const double rho_bar = p.q_in() / v_bar;
  if (!(rho_bar > p.rho_min() && rho_bar < p.rho_jam())) {
    throw InfeasibleError("equilibrium density " + std::to_string(rho_bar) +
                          " veh/m is not congested");
  }
  return {rho_bar, v_bar, h_mix, p.h_acc_bar()};
}

double equilibrium_profile_ode_rhs(double v, const ModelParams& p,
                                   const Equilibrium& eq) {
  if (v == 0.0) {
    throw DomainError("equilibrium_profile_ode_rhs: singular at v = 0");
  }
  return -(v + p.L() / (eq.h_mix_bar - 1.0 / p.q_in())) / (p.tau_mix() * v);
}

}  // namespace tgflow
