#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tgflow/controller.hpp"
#include "tgflow/linearization.hpp"
#include "tgflow/numerics.hpp"
#include "tgflow/solver.hpp"

namespace tgflow {

using numerics::NormIndex;

// ---------------------------------------------------------------------------
// Open-loop spectrum

/// f(sigma) = a2 sigma^2 - a1 (sigma + c2) exp(-sigma tau D). A positive zero
/// of f is a real unstable eigenvalue of the open-loop linear system.
double characteristic_fn(double sigma, const LinearCoeffs& lc, double D);

struct SpectralResult {
  double sigma_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Geometric bracket expansion from f(0) < 0 up to sigma = 1e3, then
/// bisection to machine resolution. Throws AnalysisError when f never turns
/// positive.
SpectralResult find_unstable_root(const LinearCoeffs& lc, double D);

// ---------------------------------------------------------------------------
// Lyapunov certificate for the closed loop

struct LyapunovGains {
  double k1, k2, k3, k4;
  double c6, c7, c8, c9;
};

LyapunovGains lyapunov_gains(const LinearCoeffs& lc, const Equilibrium& eq,
                             double k, double D);

/// A nonnegative number stored as scaled * exp(log_scale). The functional's
/// exponential weights easily exceed the double range, so values are compared
/// at a fixed scale.
struct ScaledValue {
  double log_scale = 0.0;
  double scaled = 0.0;

  double value() const;
  double log() const;
};

/// V_p = V1p + k3^{2p} V2p + k4^{2p} exp(2 k2 p D) V3p with the weighted
/// integrals evaluated by the trapezoid rule on a node grid of spacing dx.
/// The scale depends only on the gains, p and the grid.
ScaledValue lyapunov_functional(std::span<const double> z,
                                std::span<const double> v,
                                std::span<const double> z_x,
                                std::span<const double> v_x, double v_D,
                                const LyapunovGains& gains, int p, double dx);

struct LyapunovReport {
  int p = 1;
  LyapunovGains gains{};
  double tolerance = 0.0;
  double log_scale = 0.0;
  std::vector<double> times;
  std::vector<double> samples;  // V_p / exp(log_scale)
  std::size_t decay_violations = 0;
  // Largest V(t + dt) / (exp(-p k dt) V(t)); the check allows 1 + tolerance.
  double worst_ratio = 0.0;
  // Pairs where both samples are below this (same scale as `samples`) are
  // roundoff and are not checked.
  double noise_floor = 0.0;

  bool passed() const noexcept { return decay_violations == 0; }
};

/// Checks V(t + dt) <= exp(-p k dt) V(t) (1 + tol) between consecutive
/// recorded samples of a linear trajectory. Samples that have decayed below
/// (64 eps)^{2p} V(0) are at the level of floating-point cancellation in the
/// feedback and are skipped.
LyapunovReport certify_decay(const LinearTrajectory& traj,
                             const Equilibrium& eq, const LinearCoeffs& lc,
                             const LyapunovGains& gains, int p, double k,
                             double tol);

// ---------------------------------------------------------------------------
// C1 decay envelope of the closed loop

double c1_norm(std::span<const double> rho_dev, std::span<const double> v_dev,
               double dx);

struct EnvelopeReport {
  double fitted_rate = 0.0;  // -d/dt log ||.||_C1 over [t_begin, t_end]
  double mu_hat = 0.0;       // smallest mu valid on [0, t_begin]
  double worst_excess = 0.0;  // max over t > t_begin of norm / envelope
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

EnvelopeReport c1_envelope(const LinearTrajectory& traj, double k,
                           double t_begin, double t_end);

// ---------------------------------------------------------------------------
// Convective stability of the speed subsystem

/// exp(-k (x1 - x2) / c4), the exact input-output gain from x1 to x2 < x1.
double convective_gain(double x1, double x2, double k, const LinearCoeffs& lc);

struct ConvectiveCheck {
  double measured_ratio = 0.0;
  double predicted_ratio = 0.0;
  double norm_in = 0.0;
  double norm_out = 0.0;
  double grad_norm_in = 0.0;
  double grad_norm_out = 0.0;
  double measured_grad_ratio = 0.0;
};

/// Injects `signal` (sampled at dt) at x1, measures the temporal p-norm of
/// the response at x2 and compares against convective_gain. Gradient norms
/// use v_x(x1, t) = (v_t + k v) / c4 from the signal and a central difference
/// of the simulated field at x2.
ConvectiveCheck empirical_convective_check(std::span<const double> signal,
                                           double x1, double x2, NormIndex p,
                                           ControlGain gain,
                                           const LinearCoeffs& lc,
                                           const NodeGrid& grid, double dt);

}  // namespace tgflow
