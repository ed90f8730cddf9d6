#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgflow/analysis.hpp"
#include "tgflow/metrics.hpp"
#include "tgflow/scenario.hpp"
#include "tgflow/solver.hpp"

namespace tgflow {

TrafficState initial_state(const Scenario& sc, const ModelParams& p,
                           const Equilibrium& eq, const Grid& grid);

/// Runs one nonlinear simulation of the scenario, open or closed loop.
Trajectory run_single(const Scenario& sc, bool closed_loop);

struct ComparePair {
  Trajectory open;
  Trajectory closed;
};

// Both loops, run concurrently.
ComparePair run_pair(const Scenario& sc);

struct AnalysisConfig {
  std::size_t intervals = 100;
  double dt = 0.1;
  double horizon = 200.0;         // linear runs [s]
  double certificate_every = 1.0;  // spacing of Lyapunov samples [s]
  double tolerance = 5e-2;
  int p = 1;
  double envelope_begin = 5.0;
  double envelope_end = 200.0;
  double convective_dx = 1.0;
  double convective_courant = 0.99;
  double pulse_center = 60.0;
  double pulse_width = 10.0;
  double pulse_length = 120.0;
  double convective_tolerance = 0.05;
  double x1_fraction = 0.9;
  std::vector<double> x2_fractions = {0.4, 0.65};
};

struct ConvectiveCase {
  double x1 = 0.0;
  double x2 = 0.0;
  NormIndex norm = NormIndex::L2;
  ConvectiveCheck check;
  bool ratio_ok = false;
  bool gradient_ok = false;
};

struct AnalysisOutcome {
  Equilibrium eq{};
  LinearCoeffs lc{};
  SpectralResult spectral{};
  LyapunovReport lyapunov_closed;
  LyapunovReport lyapunov_open;
  EnvelopeReport envelope;
  std::vector<ConvectiveCase> convective;
  double gain = 0.0;
  AnalysisConfig config;

  bool spectral_ok() const;
  bool lyapunov_ok() const;  // closed passes and open fails
  bool envelope_ok() const;  // fitted rate >= 0.8 k / 2
  bool convective_ok() const;
  // Certificates gating the exit status: spectral, Lyapunov, convective.
  bool certificates_ok() const;
};

// Linear initial data matching the scenario's cosine on a node grid, with
// the inlet relation rho = -c5 v imposed through the speed.
DeviationField linear_cosine(const LinearCoeffs& lc, const NodeGrid& grid,
                             double amplitude, double wavenumber);

std::vector<double> gaussian_pulse(double dt, double length, double center,
                                   double width);

AnalysisOutcome analyze(const ModelParams& p, double gain,
                        const AnalysisConfig& cfg = {},
                        double amplitude = 0.01, double wavenumber = 0.0);

nlohmann::json to_json(const AnalysisOutcome& a);

struct RunArtifacts {
  std::vector<std::filesystem::path> trajectories;
  std::optional<std::filesystem::path> metrics_report;
  std::optional<std::filesystem::path> analysis_report;
  std::vector<std::filesystem::path> plots;
  std::filesystem::path manifest;
  int exit_code = 0;
};

struct RunRequest {
  enum class Command { Simulate, Analyze, Metrics, Compare, ReproducePaper };
  Command command = Command::Simulate;
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> trajectory;  // metrics on a CSV
};

/// Executes a subcommand and writes its artifacts plus manifest.json into
/// request.out. Exit code 4 when a certificate fails.
RunArtifacts run(const Scenario& sc, const RunRequest& request);

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

// Mass balance, equilibrium drift and determinism on short runs.
std::vector<InvariantCheck> seed_check(const Scenario& sc);

}  // namespace tgflow
