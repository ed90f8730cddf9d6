#include "tgflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tgflow/errors.hpp"

namespace tgflow {

namespace {

constexpr double kSigmaCeiling = 1e3;
constexpr double kSigmaStart = 1e-12;

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

std::size_t node_index(double x, const NodeGrid& grid, const char* what) {
  const double pos = x / grid.dx;
  const auto j = static_cast<std::size_t>(std::llround(pos));
  if (x < 0.0 || j > grid.intervals ||
      std::abs(pos - static_cast<double>(j)) > 1e-9 * (1.0 + pos)) {
    throw std::invalid_argument(std::string(what) + " must be a grid node");
  }
  return j;
}

}  // namespace

double characteristic_fn(double sigma, const LinearCoeffs& lc, double D) {
  return lc.a2 * sigma * sigma -
         lc.a1 * (sigma + lc.c2) * std::exp(-sigma * lc.tau_char * D);
}

SpectralResult find_unstable_root(const LinearCoeffs& lc, double D) {
  auto f = [&](double s) { return characteristic_fn(s, lc, D); };
  if (!(f(0.0) < 0.0)) {
    throw AnalysisError("characteristic function is not negative at 0");
  }

  double lo = 0.0;
  double hi = kSigmaStart;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kSigmaCeiling) {
      throw AnalysisError(
          "no sign change of the characteristic function on (0, 1e3]");
    }
  }

  SpectralResult res;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  double a = lo;
  double b = hi;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    ++res.iterations;
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    (fm < 0.0 ? a : b) = mid;
  }
  res.sigma_star = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
  res.residual = std::abs(f(res.sigma_star));
  if (!(res.sigma_star > 0.0)) {
    throw AnalysisError("bisection did not yield a positive root");
  }
  return res;
}

LyapunovGains lyapunov_gains(const LinearCoeffs& lc, const Equilibrium& eq,
                             double k, double D) {
  if (!(k > 0.0)) throw std::invalid_argument("lyapunov_gains: k must be positive");
  const double v = eq.v_bar;
  const double rho2 = eq.rho_bar * eq.rho_bar;
  const double h = eq.h_mix_bar;
  const double L = lc.c4 * h;

  LyapunovGains g{};
  g.c6 = k * std::exp(lc.c2 * D / v) * h * rho2 * (1.0 + lc.c2 / v);
  g.c7 = L * rho2 / v;
  g.c8 = 2.0 * L * rho2 / (v * v) * lc.c4;
  g.c9 = 2.0 * k * rho2 / v * (h + L / v + L * lc.c2 / (v * k));
  g.k1 = (lc.c2 + g.c6 + k) / v;
  g.k2 = g.c6 / (2.0 * lc.c4);
  g.k3 = std::max((g.c7 + g.c8 + g.c9) * std::max(v / lc.c4, 1.0), 1.0);
  g.k4 = g.k3 * std::max(lc.c4 / k, 1.0);
  return g;
}

double ScaledValue::value() const { return scaled * std::exp(log_scale); }

double ScaledValue::log() const {
  return scaled > 0.0 ? std::log(scaled) + log_scale
                      : -std::numeric_limits<double>::infinity();
}

ScaledValue lyapunov_functional(std::span<const double> z,
                                std::span<const double> v,
                                std::span<const double> z_x,
                                std::span<const double> v_x, double v_D,
                                const LyapunovGains& gains, int p, double dx) {
  const std::size_t n = z.size();
  if (n < 2 || v.size() != n || z_x.size() != n || v_x.size() != n) {
    throw std::invalid_argument("lyapunov_functional: field size mismatch");
  }
  if (p < 1) throw std::invalid_argument("lyapunov_functional: p must be >= 1");

  const double two_p = 2.0 * p;
  const double D = dx * static_cast<double>(n - 1);
  auto log_weight = [&](std::size_t j) {
    return std::log(j == 0 || j + 1 == n ? 0.5 * dx : dx);
  };
  auto e1 = [&](std::size_t j) {
    return log_weight(j) - two_p * gains.k1 * dx * static_cast<double>(j);
  };
  auto e2 = [&](std::size_t j) {
    return two_p * std::log(gains.k3) + log_weight(j) +
           two_p * gains.k2 * dx * static_cast<double>(j);
  };
  const double e3 = two_p * std::log(gains.k4) + two_p * gains.k2 * D;

  double scale = e3;
  for (std::size_t j = 0; j < n; ++j) scale = std::max({scale, e1(j), e2(j)});

  double sum = std::exp(e3 - scale) * ipow(v_D, 2 * p);
  for (std::size_t j = 0; j < n; ++j) {
    sum += std::exp(e1(j) - scale) * (ipow(z[j], 2 * p) + ipow(z_x[j], 2 * p));
    sum += std::exp(e2(j) - scale) * (ipow(v[j], 2 * p) + ipow(v_x[j], 2 * p));
  }
  return {scale, sum};
}

LyapunovReport certify_decay(const LinearTrajectory& traj,
                             const Equilibrium& eq, const LinearCoeffs& lc,
                             const LyapunovGains& gains, int p, double k,
                             double tol) {
  LyapunovReport rep;
  rep.p = p;
  rep.gains = gains;
  rep.tolerance = tol;
  rep.times = traj.times;

  const auto x = traj.grid.coordinates();
  const double dx = traj.grid.dx;
  for (const auto& s : traj.states) {
    const auto z = to_riemann(x, s.rho, s.v, eq, lc);
    const auto z_x = numerics::gradient(z, dx);
    const auto v_x = numerics::gradient(s.v, dx);
    const ScaledValue V =
        lyapunov_functional(z, s.v, z_x, v_x, s.v.back(), gains, p, dx);
    rep.log_scale = V.log_scale;
    rep.samples.push_back(V.scaled);
  }

  if (!rep.samples.empty()) {
    const double rel = 64.0 * std::numeric_limits<double>::epsilon();
    rep.noise_floor = ipow(rel, 2 * p) * rep.samples.front();
  }
  for (std::size_t i = 1; i < rep.samples.size(); ++i) {
    if (std::max(rep.samples[i - 1], rep.samples[i]) <= rep.noise_floor) {
      continue;
    }
    const double step = rep.times[i] - rep.times[i - 1];
    const double allowed = std::exp(-p * k * step) * rep.samples[i - 1];
    const double now = rep.samples[i];
    if (now > allowed * (1.0 + tol)) ++rep.decay_violations;
    if (allowed > 0.0) {
      rep.worst_ratio = std::max(rep.worst_ratio, now / allowed);
    } else if (now > 0.0) {
      rep.worst_ratio = std::numeric_limits<double>::infinity();
    }
  }
  return rep;
}

double c1_norm(std::span<const double> rho_dev, std::span<const double> v_dev,
               double dx) {
  using numerics::max_abs;
  return max_abs(rho_dev) + max_abs(numerics::gradient(rho_dev, dx)) +
         max_abs(v_dev) + max_abs(numerics::gradient(v_dev, dx));
}

EnvelopeReport c1_envelope(const LinearTrajectory& traj, double k,
                           double t_begin, double t_end) {
  EnvelopeReport rep;
  rep.t_begin = t_begin;
  rep.t_end = t_end;
  rep.times = traj.times;
  for (const auto& s : traj.states) {
    rep.norms.push_back(c1_norm(s.rho, s.v, traj.grid.dx));
  }
  if (rep.norms.empty() || rep.norms.front() == 0.0) return rep;

  const double n0 = rep.norms.front();
  auto envelope = [&](double t) { return n0 * std::exp(-0.5 * k * t); };

  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    if (t <= t_begin + 1e-12) {
      rep.mu_hat = std::max(rep.mu_hat, rep.norms[i] / envelope(t));
    }
    if (t >= t_begin - 1e-12 && t <= t_end + 1e-12 && rep.norms[i] > 0.0) {
      ts.push_back(t);
      logs.push_back(std::log(rep.norms[i]));
    }
  }
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    if (t > t_begin + 1e-12 && t <= t_end + 1e-12) {
      rep.worst_excess =
          std::max(rep.worst_excess, rep.norms[i] / (rep.mu_hat * envelope(t)));
    }
  }
  if (ts.size() >= 2) rep.fitted_rate = -numerics::fit_slope(ts, logs);
  return rep;
}

double convective_gain(double x1, double x2, double k,
                       const LinearCoeffs& lc) {
  if (!(x2 < x1)) {
    throw DomainError("convective_gain requires x2 < x1");
  }
  return std::exp(-k * (x1 - x2) / lc.c4);
}

ConvectiveCheck empirical_convective_check(std::span<const double> signal,
                                           double x1, double x2, NormIndex p,
                                           ControlGain gain,
                                           const LinearCoeffs& lc,
                                           const NodeGrid& grid, double dt) {
  if (numerics::max_abs(signal) == 0.0) {
    throw AnalysisError("convective ratio is undefined for a zero input");
  }
  const std::size_t j1 = node_index(x1, grid, "x1");
  const std::size_t j2 = node_index(x2, grid, "x2");
  if (!(j2 < j1) || j2 == 0) {
    throw DomainError("convective check needs 0 < x2 < x1 on the grid");
  }

  const double k = gain.value();
  const double transit = (x1 - x2) / lc.c4;
  const auto extra = static_cast<std::size_t>(std::ceil(1.5 * transit / dt)) + 16;
  const std::size_t steps = signal.size() - 1 + extra;
  const SpeedSubsystemRun run =
      simulate_linear_speed_subsystem(gain, lc, grid, dt, x1, signal, steps);

  std::vector<double> in(steps + 1), out(steps + 1), grad_out(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    const auto& u = run.field[n];
    in[n] = u[j1];
    out[n] = u[j2];
    grad_out[n] = (u[j2 + 1] - u[j2 - 1]) / (2.0 * grid.dx);
  }
  const auto in_t = numerics::gradient(in, dt);
  std::vector<double> grad_in(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    grad_in[n] = (in_t[n] + k * in[n]) / lc.c4;
  }

  ConvectiveCheck res;
  res.norm_in = numerics::signal_norm(in, dt, p);
  res.norm_out = numerics::signal_norm(out, dt, p);
  res.grad_norm_in = numerics::signal_norm(grad_in, dt, p);
  res.grad_norm_out = numerics::signal_norm(grad_out, dt, p);
  res.measured_ratio = res.norm_out / res.norm_in;
  res.measured_grad_ratio =
      res.grad_norm_in > 0.0 ? res.grad_norm_out / res.grad_norm_in : 0.0;
  res.predicted_ratio = convective_gain(x1, x2, k, lc);
  return res;
}

}  // namespace tgflow
