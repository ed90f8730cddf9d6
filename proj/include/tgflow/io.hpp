#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tgflow/analysis.hpp"
#include "tgflow/metrics.hpp"
#include "tgflow/scenario.hpp"
#include "tgflow/solver.hpp"

namespace tgflow {

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

inline constexpr std::string_view kTrajectoryHeader =
    "t,x,rho,v,h_acc,lambda1,lambda2";

/// CSV, time-major, one row per (recorded sample, cell), every `stride`-th
/// sample starting with the first. Values use 17 significant digits.
std::string trajectory_csv(const Trajectory& traj, const ModelParams& p,
                           std::size_t stride = 1);
void export_trajectory(const Trajectory& traj, const ModelParams& p,
                       const std::filesystem::path& path,
                       std::size_t stride = 1);

/// Rebuilds the recorded samples of a trajectory CSV. Boundary values and
/// diagnostics are not stored in the file and come back empty. dt is taken
/// from the first two samples.
Trajectory import_trajectory(const std::filesystem::path& path);
Trajectory parse_trajectory_csv(std::string_view text);

/// Columnar plot data. surface: x,t,rho,v; control-field: x,t,h_acc;
/// timeseries: t,sup_rho_dev,sup_v_dev (deviations from `eq`).
std::string plot_data(const Trajectory& traj, PlotKind kind,
                      const Equilibrium& eq);
void emit_plot_data(const Trajectory& traj, PlotKind kind,
                    const Equilibrium& eq, const std::filesystem::path& path);

nlohmann::json to_json(const Equilibrium& eq);
nlohmann::json to_json(const SpectralResult& r);
nlohmann::json to_json(const LyapunovReport& r);
nlohmann::json to_json(const EnvelopeReport& r);
nlohmann::json to_json(const ConvectiveCheck& r);
nlohmann::json to_json(const MetricSet& m);
nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const Grid& g);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

std::string version_string();

}  // namespace tgflow
