#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "tgflow/controller.hpp"
#include "tgflow/linearization.hpp"

using namespace tgflow;

namespace {

struct Fixture {
  ModelParams p;
  Equilibrium eq = equilibrium(p);
  LinearCoeffs lc = linear_coeffs(p, eq);
  NodeGrid grid = NodeGrid::over(1000.0, 100);
};

std::vector<double> random_field(std::mt19937_64& rng, std::size_t n,
                                 double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> f(n);
  for (double& v : f) v = u(rng);
  return f;
}

}  // namespace

TEST(LinearCoeffs, NominalMatchesOracle) {
  Fixture f;
  const oracle::Nominal o;
  EXPECT_NEAR(f.lc.c1, o.c1(), 1e-10 * o.c1());
  EXPECT_NEAR(f.lc.c2, o.c2(), 1e-14);
  EXPECT_NEAR(f.lc.c3, o.c3(), 1e-14);
  EXPECT_NEAR(f.lc.c4, o.c4(), 1e-12);
  EXPECT_NEAR(f.lc.c5, o.c5(), 1e-14);
  EXPECT_NEAR(f.lc.a1 / o.a1(), 1.0, 1e-12);
  EXPECT_NEAR(f.lc.a2 / o.a2(), 1.0, 1e-12);

  EXPECT_NEAR(f.lc.c1, 5.567, 1e-3);
  EXPECT_NEAR(f.lc.c2, 0.08917, 1e-5);
  EXPECT_NEAR(f.lc.c3, 0.14383, 1e-4);
  EXPECT_NEAR(f.lc.c4, 3.5981, 1e-4);
  EXPECT_NEAR(f.lc.c5, 0.034577, 1e-5);
}

TEST(LinearCoeffs, DiagonalizationIdentity) {
  for (double alpha : {0.0, 0.15, 0.5, 1.0}) {
    ModelConfig c;
    c.alpha = alpha;
    const ModelParams p(c);
    const Equilibrium eq = equilibrium(p);
    const LinearCoeffs lc = linear_coeffs(p, eq);
    EXPECT_NEAR((lc.c2 - lc.c1 * eq.h_mix_bar * eq.rho_bar * eq.rho_bar) / lc.c2,
                0.0, 1e-12);
    if (alpha == 0.0) EXPECT_EQ(lc.c3, 0.0);
  }
}

TEST(Riemann, ZeroAndInletValue) {
  Fixture f;
  const auto x = f.grid.coordinates();
  std::vector<double> zero(x.size(), 0.0), rho(x.size(), 0.0);
  for (double z : to_riemann(x, zero, zero, f.eq, f.lc)) EXPECT_EQ(z, 0.0);
  rho[0] = 0.003;
  EXPECT_DOUBLE_EQ(to_riemann(x, rho, zero, f.eq, f.lc)[0], 0.003);

  std::vector<double> z(x.size(), 0.0);
  z.back() = 1.0;
  const auto back = from_riemann(x, z, zero, f.eq, f.lc);
  EXPECT_NEAR(back.rho.back(), std::exp(-f.lc.c2 * 1000.0 / f.eq.v_bar), 1e-15);
}

TEST(Riemann, RoundTrip) {
  Fixture f;
  std::mt19937_64 rng(3);
  const auto x = f.grid.coordinates();
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = random_field(rng, x.size(), 0.02);
    const auto v = random_field(rng, x.size(), 0.5);
    const auto z = to_riemann(x, rho, v, f.eq, f.lc);
    const auto back = from_riemann(x, z, v, f.eq, f.lc);
    for (std::size_t j = 0; j < x.size(); ++j) {
      EXPECT_NEAR(back.rho[j], rho[j], 1e-12);
      EXPECT_EQ(back.v[j], v[j]);
    }
  }
}

TEST(LinearizedRhs, ZeroAndUniformDensity) {
  Fixture f;
  const std::size_t n = f.grid.nodes();
  std::vector<double> zero(n, 0.0), rho(n, 1e-3);
  const auto r0 = linearized_rhs(zero, zero, zero, f.lc, f.eq, f.grid);
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_EQ(r0.rho[j], 0.0);
    EXPECT_EQ(r0.v[j], 0.0);
  }
  const auto r = linearized_rhs(rho, zero, zero, f.lc, f.eq, f.grid);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    EXPECT_NEAR(r.v[j], -f.lc.c1 * 1e-3, 1e-15);
  }
}

TEST(LinearizedRhs, FeedbackCancelsSource) {
  Fixture f;
  const double k = 0.25;
  std::mt19937_64 rng(11);
  const std::size_t n = f.grid.nodes();
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = random_field(rng, n, 0.01);
    const auto v = random_field(rng, n, 0.3);
    std::vector<double> h(n);
    for (std::size_t j = 0; j < n; ++j) {
      h[j] = feedback_time_gap_deviation(rho[j], v[j], f.lc, k);
    }
    const auto r = linearized_rhs(rho, v, h, f.lc, f.eq, f.grid);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double v_x = (v[j + 1] - v[j]) / f.grid.dx;
      EXPECT_NEAR(r.v[j], f.lc.c4 * v_x - k * v[j], 1e-12);
    }
    EXPECT_NEAR(r.v[n - 1], -k * v[n - 1], 1e-12);
  }
}

TEST(LinearizedRhs, DiagonalFormConsistent) {
  // For smooth fields, the Riemann variable evolves as
  // z_t = -v_bar z_x - exp(c2 x / v_bar) h_mix rho^2 c3 h_acc_dev.
  Fixture f;
  const auto x = f.grid.coordinates();
  const std::size_t n = x.size();
  std::vector<double> rho(n), v(n), h(n);
  for (std::size_t j = 0; j < n; ++j) {
    rho[j] = 0.01 * std::sin(2.0 * M_PI * x[j] / 1000.0);
    v[j] = 0.2 * std::cos(2.0 * M_PI * x[j] / 1000.0);
    h[j] = 0.05 * std::sin(4.0 * M_PI * x[j] / 1000.0);
  }
  const auto r = linearized_rhs(rho, v, h, f.lc, f.eq, f.grid);
  const auto z = to_riemann(x, rho, v, f.eq, f.lc);
  const auto z_t = to_riemann(x, r.rho, r.v, f.eq, f.lc);
  const double hr2 = f.eq.h_mix_bar * f.eq.rho_bar * f.eq.rho_bar;
  double worst = 0.0, scale = 0.0;
  for (std::size_t j = 2; j + 2 < n; ++j) {
    const double z_x = (z[j + 1] - z[j - 1]) / (2.0 * f.grid.dx);
    const double expected = -f.eq.v_bar * z_x -
                            std::exp(f.lc.c2 * x[j] / f.eq.v_bar) * hr2 * f.lc.c3 * h[j];
    worst = std::max(worst, std::abs(z_t[j] - expected));
    scale = std::max(scale, std::abs(expected));
  }
  EXPECT_LT(worst / scale, 0.05);
}
