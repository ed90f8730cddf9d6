#pragma once

// Closed-form reference values computed independently of the library, from
// the raw nominal parameters.

#include <cmath>

namespace oracle {

struct Nominal {
  double q = 1200.0 / 3600.0;
  double D = 1000.0;
  double L = 5.0;
  double alpha = 0.15;
  double tau_acc = 2.0;
  double tau_m = 60.0;
  double h_m = 1.0;
  double h_acc = 1.5;
  double v_f = 27.78;
  double rho_min = 0.037;
  double h_max = 2.2;

  double tau_mix() const { return 1.0 / (alpha / tau_acc + (1.0 - alpha) / tau_m); }
  double h_mix(double h) const {
    return 1.0 / (tau_mix() * (alpha / (tau_acc * h) + (1.0 - alpha) / (tau_m * h_m)));
  }
  double h_mix() const { return h_mix(h_acc); }
  double h_min() const { return (1.0 / rho_min - L) / v_f; }
  double v_bar() const { return L / (1.0 / q - h_mix()); }
  double rho_bar() const { return q / v_bar(); }

  double c1() const { return 1.0 / (rho_bar() * rho_bar() * tau_mix() * h_mix()); }
  double c2() const { return 1.0 / tau_mix(); }
  double c3() const {
    return alpha / (tau_acc * h_acc * h_acc) * (1.0 / rho_bar() - L);
  }
  double c4() const { return L / h_mix(); }
  double c5() const { return rho_bar() / v_bar(); }
  double tau() const { return 1.0 / c4() + 1.0 / v_bar(); }
  double a1() const { return c4() * c1() * std::exp(-c2() * D / v_bar()) / v_bar(); }
  double a2() const { return v_bar() * c1() * tau_mix() * tau(); }
  double f(double s) const {
    return a2() * s * s - a1() * (s + c2()) * std::exp(-s * tau() * D);
  }
};

}  // namespace oracle
