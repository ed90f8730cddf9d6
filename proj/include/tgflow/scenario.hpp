#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tgflow/metrics.hpp"
#include "tgflow/model.hpp"
#include "tgflow/solver.hpp"

namespace tgflow {

enum class Dimension { None, Length, Time, Speed, Density, Flow, Rate };

std::string_view to_string(Dimension d);

/// Parses "1200 veh/h", "37 veh/km", "100 km/h", "0.25 1/s" and similar into
/// SI. A bare number is taken as already in SI. Throws ConfigError on an
/// unknown unit or one of the wrong dimension.
double parse_quantity(std::string_view text, Dimension expected);

struct EquilibriumInit {};

struct CosineInit {
  double amplitude = 0.01;  // veh/m
  double wavenumber = 0.0;  // rad/m; 0 means 8 pi / D
};

// Initial condition read from a trajectory CSV (last recorded sample).
struct FileInit {
  std::filesystem::path path;
};

using InitialCondition = std::variant<EquilibriumInit, CosineInit, FileInit>;

enum class RunMode { Open, Closed, Compare };

std::string_view to_string(RunMode m);
RunMode parse_run_mode(std::string_view s);

enum class PlotKind { Surface, Timeseries, ControlField };

std::string_view to_string(PlotKind k);
PlotKind parse_plot_kind(std::string_view s);

struct Scenario {
  ModelConfig model;
  std::size_t cells = 100;
  double dt = 0.1;
  double T = 350.0;
  Extrapolation extrapolation = Extrapolation::Constant;
  InitialCondition initial = CosineInit{};
  RunMode mode = RunMode::Closed;
  double gain = 0.25;  // 1/s
  FuelCoeffs fuel;
  std::size_t stride = 1;
  std::vector<PlotKind> plots = {PlotKind::Surface, PlotKind::Timeseries,
                                 PlotKind::ControlField};
  // FNV-1a of the raw file bytes; 0 for scenarios built in code.
  std::uint64_t source_hash = 0;

  ModelParams params() const;
  Grid grid() const;
};

/// Reads a JSON scenario. An empty file yields the nominal scenario. Parse
/// errors report the line; unknown keys and bad values name the field.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view text);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace tgflow
