#include "tgflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tgflow/errors.hpp"
#include "tgflow/numerics.hpp"

#ifndef TGFLOW_VERSION
#define TGFLOW_VERSION "0.0.0"
#endif

namespace tgflow {

namespace {

using json = nlohmann::json;

void put(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

template <typename... Ts>
void row(std::string& out, double first, Ts... rest) {
  put(out, first);
  ((out.push_back(','), put(out, rest)), ...);
  out.push_back('\n');
}

double control_at(const Trajectory& traj, std::size_t n, std::size_t i) {
  if (n < traj.controls.size() && i < traj.controls[n].size()) {
    return traj.controls[n].h_acc[i];
  }
  return std::nan("");
}

std::vector<double> split_numbers(std::string_view line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) end = line.size();
    const std::string cell(line.substr(start, end - start));
    char* stop = nullptr;
    const double v = std::strtod(cell.c_str(), &stop);
    if (cell.empty() || stop != cell.c_str() + cell.size()) {
      throw ValidationError("trajectory CSV line " + std::to_string(lineno) +
                            ": bad number '" + cell + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& traj, const ModelParams& p,
                           std::size_t stride) {
  if (stride == 0) throw ValidationError("stride must be at least 1");
  const auto x = traj.grid.centers();
  std::string out(kTrajectoryHeader);
  out.push_back('\n');
  for (std::size_t n = 0; n < traj.size(); n += stride) {
    const TrafficState& s = traj.states[n];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double h = control_at(traj, n, i);
      const CharSpeeds cs = char_speeds(s.rho[i], s.v[i], h, p);
      row(out, traj.times[n], x[i], s.rho[i], s.v[i], h, cs.lambda1,
          cs.lambda2);
    }
  }
  return out;
}

void export_trajectory(const Trajectory& traj, const ModelParams& p,
                       const std::filesystem::path& path, std::size_t stride) {
  write_file_atomic(path, trajectory_csv(traj, p, stride));
}

Trajectory parse_trajectory_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw ValidationError("trajectory CSV: missing or unexpected header");
  }

  Trajectory traj;
  std::vector<double> xs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_numbers(line, lineno);
    if (f.size() != 7) {
      throw ValidationError("trajectory CSV line " + std::to_string(lineno) +
                            ": expected 7 columns");
    }
    if (traj.times.empty() || f[0] != traj.times.back()) {
      traj.times.push_back(f[0]);
      traj.states.emplace_back();
      traj.states.back().t = f[0];
      traj.controls.emplace_back();
    }
    TrafficState& s = traj.states.back();
    if (traj.states.size() == 1) xs.push_back(f[1]);
    s.x.push_back(f[1]);
    s.rho.push_back(f[2]);
    s.v.push_back(f[3]);
    traj.controls.back().h_acc.push_back(f[4]);
    traj.controls.back().saturated.push_back(0);
  }
  if (traj.states.empty()) return traj;

  for (const auto& s : traj.states) {
    if (s.x != xs) {
      throw ValidationError("trajectory CSV: samples use different cells");
    }
  }
  traj.grid.cells = xs.size();
  traj.grid.dx = 2.0 * xs.front();
  traj.grid.dt = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
  traj.grid.T = traj.times.back();
  return traj;
}

Trajectory import_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trajectory_csv(ss.str());
}

std::string plot_data(const Trajectory& traj, PlotKind kind,
                      const Equilibrium& eq) {
  std::string out;
  const auto x = traj.grid.centers();
  switch (kind) {
    case PlotKind::Surface:
      out = "x,t,rho,v\n";
      for (std::size_t n = 0; n < traj.size(); ++n) {
        const auto& s = traj.states[n];
        for (std::size_t i = 0; i < s.size(); ++i) {
          row(out, x[i], traj.times[n], s.rho[i], s.v[i]);
        }
      }
      break;
    case PlotKind::ControlField:
      out = "x,t,h_acc\n";
      for (std::size_t n = 0; n < traj.size(); ++n) {
        for (std::size_t i = 0; i < traj.states[n].size(); ++i) {
          row(out, x[i], traj.times[n], control_at(traj, n, i));
        }
      }
      break;
    case PlotKind::Timeseries:
      out = "t,sup_rho_dev,sup_v_dev\n";
      for (std::size_t n = 0; n < traj.size(); ++n) {
        const DeviationField d = deviations(traj.states[n], eq);
        row(out, traj.times[n], numerics::max_abs(d.rho),
            numerics::max_abs(d.v));
      }
      break;
  }
  return out;
}

void emit_plot_data(const Trajectory& traj, PlotKind kind,
                    const Equilibrium& eq, const std::filesystem::path& path) {
  write_file_atomic(path, plot_data(traj, kind, eq));
}

json to_json(const Equilibrium& eq) {
  return {{"rho_bar", eq.rho_bar},
          {"v_bar", eq.v_bar},
          {"rho_bar_veh_per_km", eq.rho_bar * 1000.0},
          {"v_bar_km_per_h", eq.v_bar * 3.6},
          {"h_mix_bar", eq.h_mix_bar},
          {"h_acc_bar", eq.h_acc_bar}};
}

json to_json(const SpectralResult& r) {
  return {{"sigma_star", r.sigma_star},
          {"bracket", {r.bracket_lo, r.bracket_hi}},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"passed", r.sigma_star > 0.0 && r.residual <= 1e-10}};
}

json to_json(const LyapunovReport& r) {
  const auto& g = r.gains;
  return {{"p", r.p},
          {"gains", {{"k1", g.k1}, {"k2", g.k2}, {"k3", g.k3}, {"k4", g.k4}}},
          {"constants", {{"c6", g.c6}, {"c7", g.c7}, {"c8", g.c8}, {"c9", g.c9}}},
          {"tolerance", r.tolerance},
          {"log_scale", r.log_scale},
          {"noise_floor", r.noise_floor},
          {"sample_count", r.samples.size()},
          {"decay_violations", r.decay_violations},
          {"worst_ratio", r.worst_ratio},
          {"passed", r.passed()}};
}

json to_json(const EnvelopeReport& r) {
  return {{"fitted_rate", r.fitted_rate},
          {"mu_hat", r.mu_hat},
          {"worst_excess", r.worst_excess},
          {"window", {r.t_begin, r.t_end}}};
}

json to_json(const ConvectiveCheck& r) {
  return {{"measured_ratio", r.measured_ratio},
          {"predicted_ratio", r.predicted_ratio},
          {"norm_in", r.norm_in},
          {"norm_out", r.norm_out},
          {"grad_norm_in", r.grad_norm_in},
          {"grad_norm_out", r.grad_norm_out},
          {"measured_grad_ratio", r.measured_grad_ratio}};
}

json to_json(const MetricSet& m) {
  return {{"J_fuel1", m.fuel}, {"J_comfort", m.comfort}, {"J_TTT", m.ttt}};
}

json to_json(const MetricsReport& r) {
  json j = {{"open_loop", to_json(r.open)},
            {"closed_loop", to_json(r.closed)},
            {"improvement_pct", to_json(r.improvement_pct)},
            {"fuel_units", r.fuel_units}};
  j["improvement_pct"]["J_fuel2"] =
      r.fuel2_improvement_pct ? json(*r.fuel2_improvement_pct) : json(nullptr);
  return j;
}

json to_json(const Grid& g) {
  return {{"cells", g.cells}, {"dx", g.dx}, {"dt", g.dt}, {"T", g.T},
          {"steps", g.steps()}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

std::string version_string() { return TGFLOW_VERSION; }

}  // namespace tgflow
