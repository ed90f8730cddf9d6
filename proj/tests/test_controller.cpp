#include <gtest/gtest.h>

#include "oracle.hpp"
#include "tgflow/controller.hpp"
#include "tgflow/errors.hpp"
#include "tgflow/solver.hpp"

using namespace tgflow;

namespace {

struct Fixture {
  ModelParams p;
  Equilibrium eq = equilibrium(p);
  LinearCoeffs lc = linear_coeffs(p, eq);
  Grid grid = Grid::over(1000.0, 4, 0.1, 1.0);

  TrafficState uniform(double rho, double v) const {
    TrafficState s = equilibrium_state(p, eq, grid);
    s.rho.assign(grid.cells, rho);
    s.v.assign(grid.cells, v);
    return s;
  }
};

}  // namespace

TEST(ControlGain, RejectsNonPositive) {
  EXPECT_THROW(ControlGain(0.0), ValidationError);
  EXPECT_THROW(ControlGain(-0.1), ValidationError);
  EXPECT_DOUBLE_EQ(ControlGain(0.25).value(), 0.25);
}

TEST(FeedbackLaw, EquilibriumIsFixedPoint) {
  Fixture f;
  const auto c = feedback_law(f.uniform(f.eq.rho_bar, f.eq.v_bar), f.eq, f.lc,
                              ControlGain(0.25), f.p);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c.h_acc[i], 1.5);
    EXPECT_EQ(c.saturated[i], 0);
  }
  EXPECT_EQ(c.saturation_fraction(), 0.0);
}

TEST(FeedbackLaw, SpeedExcessSaturates) {
  Fixture f;
  const oracle::Nominal o;
  const double raw = 1.5 + (0.25 - o.c2()) / o.c3();
  EXPECT_NEAR(raw, 2.618, 1e-3);
  const auto c = feedback_law(f.uniform(f.eq.rho_bar, f.eq.v_bar + 1.0), f.eq,
                              f.lc, ControlGain(0.25), f.p);
  EXPECT_EQ(c.h_acc[0], 2.2);
  EXPECT_EQ(c.saturated[0], 1);
  EXPECT_EQ(c.saturation_fraction(), 1.0);
}

TEST(FeedbackLaw, DensityExcessUnsaturated) {
  Fixture f;
  const oracle::Nominal o;
  const double expected = 1.5 - o.c1() * 0.01 / o.c3();
  const auto c = feedback_law(f.uniform(f.eq.rho_bar + 0.01, f.eq.v_bar), f.eq,
                              f.lc, ControlGain(0.25), f.p);
  EXPECT_NEAR(c.h_acc[0], expected, 1e-12);
  EXPECT_NEAR(c.h_acc[0], 1.113, 1e-3);
  EXPECT_EQ(c.saturated[0], 0);
}

TEST(FeedbackLaw, AffineSlopes) {
  Fixture f;
  const double k = 0.3;
  EXPECT_NEAR(feedback_time_gap_deviation(1.0, 0.0, f.lc, k), -f.lc.c1 / f.lc.c3, 1e-12);
  EXPECT_NEAR(feedback_time_gap_deviation(0.0, 1.0, f.lc, k), (k - f.lc.c2) / f.lc.c3,
              1e-12);
}

TEST(FeedbackLaw, NoAuthorityWithoutAcc) {
  ModelConfig c;
  c.alpha = 0.0;
  const ModelParams p(c);
  const Equilibrium eq = equilibrium(p);
  const LinearCoeffs lc = linear_coeffs(p, eq);
  const Grid g = Grid::over(1000.0, 4, 0.1, 1.0);
  EXPECT_THROW(feedback_law(equilibrium_state(p, eq, g), eq, lc, ControlGain(0.25), p),
               NoAuthorityError);
}

TEST(ClosedLoopSource, Values) {
  Fixture f;
  const oracle::Nominal o;
  const auto ctrl = ControlField::uniform(f.grid.cells, 1.5);
  for (double s : closed_loop_source(f.uniform(f.eq.rho_bar, f.eq.v_bar), ctrl, f.p)) {
    EXPECT_NEAR(s, 0.0, 1e-15);
  }
  const auto src =
      closed_loop_source(f.uniform(f.eq.rho_bar, f.eq.v_bar - 0.5), ctrl, f.p);
  EXPECT_NEAR(src[0], 0.5 / o.tau_mix(), 1e-12);
  EXPECT_NEAR(src[0], 0.04458, 1e-5);

  const double rho = 0.09;
  const auto on_curve = closed_loop_source(
      f.uniform(rho, v_mix(rho, 1.8, f.p)), ControlField::uniform(f.grid.cells, 1.8), f.p);
  EXPECT_NEAR(on_curve[1], 0.0, 1e-15);
}
