#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "tgflow/errors.hpp"
#include "tgflow/io.hpp"
#include "tgflow/run.hpp"
#include "tgflow/scenario.hpp"

using namespace tgflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tgflow_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

Trajectory toy(std::size_t samples) {
  const ModelParams p;
  const Equilibrium eq = equilibrium(p);
  const Grid g = Grid::over(1000.0, 10, 0.1, 0.1 * static_cast<double>(samples - 1));
  return simulate(p, g, cosine_state(p, eq, g, 0.01, 0.0251), OpenLoop{});
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TGFLOW_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Units, Conversions) {
  EXPECT_NEAR(parse_quantity("1200 veh/h", Dimension::Flow), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(parse_quantity("37 veh/km", Dimension::Density), 0.037, 1e-15);
  EXPECT_NEAR(parse_quantity("100 km/h", Dimension::Speed), 27.777777777777779, 1e-12);
  EXPECT_DOUBLE_EQ(parse_quantity("1 km", Dimension::Length), 1000.0);
  EXPECT_DOUBLE_EQ(parse_quantity(" 0.25 1/s ", Dimension::Rate), 0.25);
  EXPECT_DOUBLE_EQ(parse_quantity("2", Dimension::Time), 2.0);
  EXPECT_THROW(parse_quantity("5 furlong", Dimension::Length), ConfigError);
  EXPECT_THROW(parse_quantity("5 s", Dimension::Length), ConfigError);
  EXPECT_THROW(parse_quantity("fast", Dimension::Speed), ConfigError);
}

TEST(Scenario, EmptyMeansNominal) {
  const Scenario s = parse_scenario("");
  const ModelConfig d;
  EXPECT_EQ(s.model.q_in, d.q_in);
  EXPECT_EQ(s.model.rho_min, d.rho_min);
  EXPECT_EQ(s.cells, 100u);
  EXPECT_EQ(s.dt, 0.1);
  EXPECT_EQ(s.T, 350.0);
  EXPECT_EQ(s.mode, RunMode::Closed);
  EXPECT_EQ(s.gain, 0.25);
  ASSERT_TRUE(std::holds_alternative<CosineInit>(s.initial));
  EXPECT_EQ(std::get<CosineInit>(s.initial).amplitude, 0.01);
  EXPECT_EQ(parse_scenario("   \n").source_hash, fnv1a("   \n"));
}

TEST(Scenario, UnitsAndCosine) {
  const Scenario s = parse_scenario(R"({
    "model": {"q_in": "1000 veh/h", "D": "1 km", "v_f": "100 km/h"},
    "grid": {"cells": 200, "dt": "0.05 s", "T": "1 min"},
    "initial": {"kind": "cosine", "amplitude": "10 veh/km", "cycles": 4},
    "mode": "compare",
    "gain": "0.3 1/s",
    "output": {"stride": 5, "plots": ["surface"]}
  })");
  EXPECT_NEAR(s.model.q_in, 1000.0 / 3600.0, 1e-15);
  EXPECT_NEAR(s.model.v_f, 100.0 / 3.6, 1e-12);
  EXPECT_EQ(s.cells, 200u);
  EXPECT_EQ(s.T, 60.0);
  EXPECT_EQ(s.mode, RunMode::Compare);
  EXPECT_EQ(s.gain, 0.3);
  EXPECT_EQ(s.stride, 5u);
  const auto& c = std::get<CosineInit>(s.initial);
  EXPECT_NEAR(c.amplitude, 0.01, 1e-15);
  EXPECT_NEAR(c.wavenumber, 8.0 * std::numbers::pi / 1000.0, 1e-15);
}

TEST(Scenario, Errors) {
  try {
    parse_scenario(R"({"model": {"q_in": "2000 veh/h"}})");
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("q_in"), std::string::npos) << e.what();
  }
  try {
    parse_scenario(R"({"model": {"speed": 3}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.speed"), std::string::npos);
  }
  try {
    parse_scenario("{\n\"grid\": {\n\"cells\": ,\n}}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_scenario(R"({"grid": {"dt": "3 km"}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"gain": -1})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"mode": "sideways"})"), ConfigError);
  EXPECT_THROW(parse_plot_kind("histogram"), ValidationError);
}

TEST(Trajectory, RowCountsFollowStride) {
  const ModelParams p;
  const Trajectory t = toy(2);
  ASSERT_EQ(t.size(), 2u);
  for (std::size_t stride : {1u, 2u, 3u}) {
    const std::string csv = trajectory_csv(t, p, stride);
    const std::size_t expected = (2 + stride - 1) / stride * 10;
    EXPECT_EQ(count_lines(csv), expected + 1) << "stride " << stride;
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kTrajectoryHeader);
  }
}

TEST(Trajectory, RoundTripIsExact) {
  const ModelParams p;
  const Trajectory t = toy(6);
  const fs::path dir = scratch("roundtrip");
  export_trajectory(t, p, dir / "t.csv");
  EXPECT_FALSE(fs::exists(dir / "t.csv.tmp"));
  const Trajectory back = import_trajectory(dir / "t.csv");
  ASSERT_EQ(back.size(), t.size());
  EXPECT_EQ(back.grid.cells, t.grid.cells);
  EXPECT_EQ(back.grid.dx, t.grid.dx);
  for (std::size_t n = 0; n < t.size(); ++n) {
    EXPECT_EQ(back.times[n], t.times[n]);
    EXPECT_EQ(back.states[n].rho, t.states[n].rho);
    EXPECT_EQ(back.states[n].v, t.states[n].v);
    EXPECT_EQ(back.controls[n].h_acc, t.controls[n].h_acc);
  }
  EXPECT_EQ(trajectory_csv(back, p), trajectory_csv(t, p));
}

TEST(Trajectory, CharacteristicColumns) {
  const ModelParams p;
  const Trajectory t = toy(2);
  const Trajectory back = parse_trajectory_csv(trajectory_csv(t, p));
  std::istringstream in(trajectory_csv(t, p));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  double vals[7];
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream row(line);
  for (double& v : vals) row >> v;
  const auto cs = char_speeds(vals[2], vals[3], vals[4], p);
  EXPECT_EQ(vals[5], cs.lambda1);
  EXPECT_EQ(vals[6], cs.lambda2);
}

TEST(Trajectory, BadCsvRejected) {
  EXPECT_THROW(parse_trajectory_csv("a,b\n"), ValidationError);
  EXPECT_THROW(parse_trajectory_csv(std::string(kTrajectoryHeader) + "\n1,2,3\n"),
               ValidationError);
}

TEST(PlotData, KindsAndEmpty) {
  const ModelParams p;
  const Equilibrium eq = equilibrium(p);
  Trajectory empty;
  empty.grid = Grid::over(1000.0, 10, 0.1, 1.0);
  EXPECT_EQ(plot_data(empty, PlotKind::Surface, eq), "x,t,rho,v\n");
  EXPECT_EQ(plot_data(empty, PlotKind::Timeseries, eq), "t,sup_rho_dev,sup_v_dev\n");
  EXPECT_EQ(plot_data(empty, PlotKind::ControlField, eq), "x,t,h_acc\n");

  const Trajectory t = toy(3);
  EXPECT_EQ(count_lines(plot_data(t, PlotKind::Surface, eq)), 1 + 30u);
  EXPECT_EQ(count_lines(plot_data(t, PlotKind::Timeseries, eq)), 1 + 3u);
}

TEST(Run, ClosedLoopControlFieldAndTimeseries) {
  Scenario s = parse_scenario("");
  const Trajectory t = run_single(s, true);
  for (const auto& c : t.controls) {
    for (double h : c.h_acc) {
      EXPECT_GE(h, 0.8 - 1e-3);
      EXPECT_LE(h, 2.2);
    }
  }
  // Sup-norm of the speed deviation stays below its running envelope.
  const ModelParams p;
  const Equilibrium eq = equilibrium(p);
  double first = 0.0, last = 0.0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    double m = 0.0;
    for (double v : t.states[n].v) m = std::max(m, std::abs(v - eq.v_bar));
    if (n == 0) first = m;
    if (n + 1 == t.size()) last = m;
  }
  EXPECT_LT(last, 0.01 * first);
}

TEST(Run, EquilibriumScenarioIsFlat) {
  Scenario s = parse_scenario(R"({"initial": {"kind": "equilibrium"}, "grid": {"T": 20}})");
  const fs::path dir = scratch("flat");
  RunRequest req;
  req.out = dir;
  s.mode = RunMode::Open;
  const auto art = run(s, req);
  ASSERT_EQ(art.trajectories.size(), 1u);
  const Trajectory t = import_trajectory(art.trajectories.front());
  const Equilibrium eq = equilibrium(ModelParams{});
  for (const auto& st : t.states) {
    for (std::size_t i = 0; i < st.size(); ++i) {
      EXPECT_NEAR(st.rho[i], eq.rho_bar, 1e-12);
      EXPECT_NEAR(st.v[i], eq.v_bar, 1e-12);
    }
  }
  const auto manifest = nlohmann::json::parse(slurp(art.manifest));
  for (const char* key : {"scenario_hash", "version", "grid", "elapsed_s"}) {
    EXPECT_TRUE(manifest.contains(key)) << key;
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    EXPECT_NE(e.path().extension(), ".tmp");
  }
}

TEST(Run, CompareEmitsTableShapedReport) {
  Scenario s = parse_scenario(R"({"grid": {"T": 60}})");
  const fs::path dir = scratch("compare");
  RunRequest req;
  req.out = dir;
  req.command = RunRequest::Command::Compare;
  const auto art = run(s, req);
  ASSERT_TRUE(art.metrics_report);
  const auto j = nlohmann::json::parse(slurp(*art.metrics_report));
  for (const char* row : {"J_fuel1", "J_comfort", "J_TTT", "J_fuel2"}) {
    EXPECT_TRUE(j["improvement_pct"].contains(row)) << row;
  }
  EXPECT_TRUE(j["improvement_pct"]["J_fuel2"].is_null());
  EXPECT_EQ(art.trajectories.size(), 2u);
}

TEST(Run, DeterministicCsv) {
  Scenario s = parse_scenario(R"({"grid": {"T": 30}})");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunRequest req;
  req.out = a;
  run(s, req);
  req.out = b;
  run(s, req);
  EXPECT_EQ(slurp(a / "trajectory_closed.csv"), slurp(b / "trajectory_closed.csv"));
}

TEST(Run, InitialConditionFromFile) {
  const fs::path dir = scratch("fromfile");
  const ModelParams p;
  const Trajectory t = run_single(parse_scenario(R"({"grid": {"T": 5}})"), false);
  export_trajectory(t, p, dir / "seed.csv");
  const std::string text =
      R"({"initial": {"kind": "file", "path": ")" + (dir / "seed.csv").string() +
      R"("}, "grid": {"T": 1}})";
  const Scenario s = parse_scenario(text);
  const Trajectory r = run_single(s, false);
  EXPECT_EQ(r.states.front().rho, t.states.back().rho);
}

TEST(SeedCheck, AllPass) {
  const auto checks = seed_check(parse_scenario(""));
  ASSERT_EQ(checks.size(), 3u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  {
    std::ofstream(dir / "bad.json") << R"({"model": {"q_in": "5000 veh/h"}})";
    std::ofstream(dir / "unstable.json") << R"({"grid": {"dt": 2.5, "T": 10}, "mode": "open"})";
    std::ofstream(dir / "ok.json") << R"({"grid": {"T": 5}})";
  }
  EXPECT_EQ(run_cli("simulate --scenario " + (dir / "bad.json").string() + " --out " +
                    (dir / "o1").string()),
            2);
  EXPECT_EQ(run_cli("simulate --scenario " + (dir / "unstable.json").string() + " --out " +
                    (dir / "o2").string()),
            3);
  EXPECT_EQ(run_cli("simulate --scenario " + (dir / "ok.json").string() + " --mode open --out " +
                    (dir / "o3").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "o3" / "trajectory_open.csv"));
  EXPECT_TRUE(fs::exists(dir / "o3" / "manifest.json"));
  EXPECT_EQ(run_cli("simulate --gain -1 --out " + (dir / "o4").string()), 2);
}
