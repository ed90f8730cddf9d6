// Command-line front end: tgflow <simulate|analyze|metrics|compare|reproduce-paper>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tgflow/errors.hpp"
#include "tgflow/run.hpp"
#include "tgflow/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCertificate = 4;

}  // namespace

int main(int argc, char** argv) {
  using tgflow::RunRequest;

  CLI::App app{"Mixed ACC/manual traffic on a freeway stretch: simulation, "
               "time-gap feedback and stability checks"};
  app.require_subcommand(0, 1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::size_t stride = 0;
  std::string mode;
  std::optional<double> gain;
  bool seed = false;
  std::string trajectory;

  app.add_option("--scenario", scenario_path, "Scenario file (JSON); empty or absent means nominal")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--stride", stride, "Write every n-th time sample")
      ->check(CLI::PositiveNumber);
  app.add_option("--mode", mode, "open, closed or compare")
      ->check(CLI::IsMember({"open", "closed", "compare"}));
  app.add_option("--gain", gain, "Feedback gain k [1/s]");
  app.add_flag("--seed-check", seed, "Run the solver invariant suite");

  auto* simulate = app.add_subcommand("simulate", "Run the nonlinear model");
  auto* analyze = app.add_subcommand(
      "analyze", "Spectral, Lyapunov and convective certificates");
  auto* metrics = app.add_subcommand("metrics", "Fuel, comfort and travel-time indices");
  metrics->add_option("--trajectory", trajectory, "Evaluate an exported trajectory CSV")
      ->check(CLI::ExistingFile);
  auto* compare = app.add_subcommand("compare", "Open vs closed loop with improvements");
  auto* paper = app.add_subcommand("reproduce-paper", "Full pipeline: compare and analyze");
  for (auto* sub : {simulate, analyze, metrics, compare, paper}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    tgflow::Scenario sc = scenario_path.empty()
                              ? tgflow::parse_scenario("")
                              : tgflow::load_scenario(scenario_path);
    if (stride > 0) sc.stride = stride;
    if (!mode.empty()) sc.mode = tgflow::parse_run_mode(mode);
    if (gain) {
      if (!(*gain > 0.0)) throw tgflow::ValidationError("--gain must be positive");
      sc.gain = *gain;
    }

    int code = 0;
    if (seed) {
      for (const auto& c : tgflow::seed_check(sc)) {
        std::printf("%-28s %-4s value=%.3e limit=%.3e\n", c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.value, c.limit);
        if (!c.passed) code = kExitCertificate;
      }
    }
    if (app.get_subcommands().empty()) {
      if (!seed) std::cout << app.help();
      return code;
    }

    RunRequest req;
    req.out = out_dir;
    if (!trajectory.empty()) req.trajectory = trajectory;
    if (*simulate) req.command = RunRequest::Command::Simulate;
    if (*analyze) req.command = RunRequest::Command::Analyze;
    if (*metrics) req.command = RunRequest::Command::Metrics;
    if (*compare) req.command = RunRequest::Command::Compare;
    if (*paper) req.command = RunRequest::Command::ReproducePaper;

    const tgflow::RunArtifacts art = tgflow::run(sc, req);
    for (const auto& p : art.trajectories) std::cout << "trajectory " << p.string() << "\n";
    for (const auto& p : art.plots) std::cout << "plot       " << p.string() << "\n";
    if (art.metrics_report) std::cout << "metrics    " << art.metrics_report->string() << "\n";
    if (art.analysis_report) std::cout << "analysis   " << art.analysis_report->string() << "\n";
    std::cout << "manifest   " << art.manifest.string() << "\n";
    return art.exit_code != 0 ? art.exit_code : code;
  } catch (const tgflow::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const tgflow::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const tgflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
