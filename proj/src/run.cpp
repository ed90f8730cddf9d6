#include "tgflow/run.hpp"

#include <cmath>
#include <future>
#include <numbers>

#include "tgflow/errors.hpp"
#include "tgflow/io.hpp"

namespace tgflow {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

double default_wavenumber(double k, double D) {
  return k > 0.0 ? k : 8.0 * std::numbers::pi / D;
}

std::string norm_name(NormIndex n) {
  switch (n) {
    case NormIndex::L1: return "L1";
    case NormIndex::L2: return "L2";
    case NormIndex::Linf: return "Linf";
  }
  return "?";
}

std::pair<double, double> cosine_parameters(const Scenario& sc) {
  if (const auto* c = std::get_if<CosineInit>(&sc.initial)) {
    return {c->amplitude, default_wavenumber(c->wavenumber, sc.model.D)};
  }
  return {0.01, default_wavenumber(0.0, sc.model.D)};
}

std::vector<fs::path> write_plots(const Trajectory& traj, const Scenario& sc,
                                  const Equilibrium& eq, const fs::path& dir,
                                  const std::string& tag) {
  std::vector<fs::path> out;
  for (PlotKind kind : sc.plots) {
    if (kind == PlotKind::ControlField && tag == "open") continue;
    const fs::path path =
        dir / ("plot_" + tag + "_" + std::string(to_string(kind)) + ".csv");
    emit_plot_data(traj, kind, eq, path);
    out.push_back(path);
  }
  return out;
}

void write_manifest(const Scenario& sc, const RunRequest& req,
                    const RunArtifacts& art, double elapsed) {
  json files = json::array();
  for (const auto& p : art.trajectories) files.push_back(p.filename().string());
  for (const auto& p : art.plots) files.push_back(p.filename().string());
  if (art.metrics_report) files.push_back(art.metrics_report->filename().string());
  if (art.analysis_report) {
    files.push_back(art.analysis_report->filename().string());
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(sc.source_hash));
  const json m = {{"scenario_hash", hash},
                  {"version", version_string()},
                  {"grid", to_json(sc.grid())},
                  {"mode", to_string(sc.mode)},
                  {"gain", sc.gain},
                  {"stride", sc.stride},
                  {"elapsed_s", elapsed},
                  {"artifacts", files},
                  {"exit_code", art.exit_code},
                  {"out", req.out.string()}};
  write_json(art.manifest, m);
}

}  // namespace

TrafficState initial_state(const Scenario& sc, const ModelParams& p,
                           const Equilibrium& eq, const Grid& grid) {
  if (std::holds_alternative<EquilibriumInit>(sc.initial)) {
    return equilibrium_state(p, eq, grid, sc.extrapolation);
  }
  if (const auto* c = std::get_if<CosineInit>(&sc.initial)) {
    return cosine_state(p, eq, grid, c->amplitude,
                        default_wavenumber(c->wavenumber, p.D()),
                        sc.extrapolation);
  }
  const auto& file = std::get<FileInit>(sc.initial);
  const Trajectory t = import_trajectory(file.path);
  if (t.size() == 0 || t.grid.cells != grid.cells) {
    throw ValidationError("initial.path: trajectory does not match the grid");
  }
  TrafficState s = t.states.back();
  s.t = 0.0;
  s.x = grid.centers();
  initialize_boundaries(s, p, sc.extrapolation);
  return s;
}

Trajectory run_single(const Scenario& sc, bool closed_loop) {
  const ModelParams p = sc.params();
  const Equilibrium eq = equilibrium(p);
  const Grid grid = sc.grid();
  const TrafficState init = initial_state(sc, p, eq, grid);
  SolverOptions opts;
  opts.extrapolation = sc.extrapolation;
  const LoopMode mode = closed_loop ? LoopMode{ClosedLoop{ControlGain(sc.gain)}}
                                    : LoopMode{OpenLoop{}};
  return simulate(p, grid, init, mode, opts);
}

ComparePair run_pair(const Scenario& sc) {
  auto open = std::async(std::launch::async, [&] { return run_single(sc, false); });
  Trajectory closed = run_single(sc, true);
  return {open.get(), std::move(closed)};
}

bool AnalysisOutcome::spectral_ok() const {
  return spectral.sigma_star > 0.0 && spectral.residual <= 1e-10;
}

bool AnalysisOutcome::lyapunov_ok() const {
  return lyapunov_closed.passed() && !lyapunov_open.passed();
}

bool AnalysisOutcome::envelope_ok() const {
  return envelope.fitted_rate >= 0.8 * gain / 2.0;
}

bool AnalysisOutcome::convective_ok() const {
  if (convective.empty()) return false;
  for (const auto& c : convective) {
    if (!c.ratio_ok || !c.gradient_ok) return false;
  }
  return true;
}

bool AnalysisOutcome::certificates_ok() const {
  return spectral_ok() && lyapunov_ok() && convective_ok();
}

DeviationField linear_cosine(const LinearCoeffs& lc, const NodeGrid& grid,
                             double amplitude, double wavenumber) {
  DeviationField d;
  for (double x : grid.coordinates()) {
    const double r = amplitude * std::cos(wavenumber * x);
    d.rho.push_back(r);
    d.v.push_back(-r / lc.c5);
  }
  return d;
}

std::vector<double> gaussian_pulse(double dt, double length, double center,
                                   double width) {
  std::vector<double> s;
  for (std::size_t n = 0; static_cast<double>(n) * dt <= length; ++n) {
    const double u = (static_cast<double>(n) * dt - center) / width;
    s.push_back(std::exp(-0.5 * u * u));
  }
  return s;
}

AnalysisOutcome analyze(const ModelParams& p, double gain,
                        const AnalysisConfig& cfg, double amplitude,
                        double wavenumber) {
  AnalysisOutcome a;
  a.gain = gain;
  a.config = cfg;
  a.eq = equilibrium(p);
  a.lc = linear_coeffs(p, a.eq);
  a.spectral = find_unstable_root(a.lc, p.D());

  const NodeGrid grid = NodeGrid::over(p.D(), cfg.intervals);
  const DeviationField init = linear_cosine(
      a.lc, grid, amplitude, default_wavenumber(wavenumber, p.D()));
  const auto every = static_cast<std::size_t>(
      std::max(1.0, std::round(cfg.certificate_every / cfg.dt)));
  const LinearTrajectory closed =
      simulate_linear(a.lc, a.eq, grid, cfg.dt, cfg.horizon, init, gain, 1);
  const LinearTrajectory open = simulate_linear(
      a.lc, a.eq, grid, cfg.dt, cfg.horizon, init, std::nullopt, every);

  LinearTrajectory closed_sparse{closed.grid, closed.dt, {}, {}};
  for (std::size_t n = 0; n < closed.states.size(); n += every) {
    closed_sparse.times.push_back(closed.times[n]);
    closed_sparse.states.push_back(closed.states[n]);
  }
  const LyapunovGains gains = lyapunov_gains(a.lc, a.eq, gain, p.D());
  a.lyapunov_closed =
      certify_decay(closed_sparse, a.eq, a.lc, gains, cfg.p, gain, cfg.tolerance);
  a.lyapunov_open =
      certify_decay(open, a.eq, a.lc, gains, cfg.p, gain, cfg.tolerance);
  a.envelope = c1_envelope(closed, gain, cfg.envelope_begin, cfg.envelope_end);

  const auto fine_intervals =
      static_cast<std::size_t>(std::llround(p.D() / cfg.convective_dx));
  const NodeGrid fine = NodeGrid::over(p.D(), fine_intervals);
  const double dt = cfg.convective_courant * fine.dx / a.lc.c4;
  const auto signal =
      gaussian_pulse(dt, cfg.pulse_length, cfg.pulse_center, cfg.pulse_width);
  auto snap = [&](double frac) {
    return fine.x(static_cast<std::size_t>(
        std::llround(frac * static_cast<double>(fine.intervals))));
  };
  const double x1 = snap(cfg.x1_fraction);
  for (double f2 : cfg.x2_fractions) {
    const double x2 = snap(f2);
    for (NormIndex n : {NormIndex::L2, NormIndex::Linf}) {
      ConvectiveCase c;
      c.x1 = x1;
      c.x2 = x2;
      c.norm = n;
      c.check = empirical_convective_check(signal, x1, x2, n, ControlGain(gain),
                                           a.lc, fine, dt);
      const double rel = c.check.measured_ratio / c.check.predicted_ratio;
      c.ratio_ok = std::abs(rel - 1.0) <= cfg.convective_tolerance &&
                   c.check.norm_out < c.check.norm_in;
      c.gradient_ok = c.check.grad_norm_out < c.check.grad_norm_in;
      a.convective.push_back(c);
    }
  }
  return a;
}

json to_json(const AnalysisOutcome& a) {
  json conv = json::array();
  for (const auto& c : a.convective) {
    json j = to_json(c.check);
    j["x1"] = c.x1;
    j["x2"] = c.x2;
    j["norm"] = norm_name(c.norm);
    j["ratio_within_tolerance"] = c.ratio_ok;
    j["gradient_inequality"] = c.gradient_ok;
    conv.push_back(j);
  }
  json spectral = to_json(a.spectral);
  json closed = to_json(a.lyapunov_closed);
  json open = to_json(a.lyapunov_open);
  json env = to_json(a.envelope);
  env["required_rate"] = 0.8 * a.gain / 2.0;
  env["passed"] = a.envelope_ok();
  return {{"gain", a.gain},
          {"equilibrium", to_json(a.eq)},
          {"coefficients",
           {{"c1", a.lc.c1}, {"c2", a.lc.c2}, {"c3", a.lc.c3}, {"c4", a.lc.c4},
            {"c5", a.lc.c5}, {"a1", a.lc.a1}, {"a2", a.lc.a2}}},
          {"spectral", spectral},
          {"lyapunov",
           {{"closed_loop", closed},
            {"open_loop", open},
            {"passed", a.lyapunov_ok()}}},
          {"envelope", env},
          {"convective",
           {{"cases", conv},
            {"tolerance", a.config.convective_tolerance},
            {"passed", a.convective_ok()}}},
          {"certificates_passed", a.certificates_ok()}};
}

RunArtifacts run(const Scenario& sc, const RunRequest& req) {
  using Cmd = RunRequest::Command;
  const auto start = std::chrono::steady_clock::now();
  RunArtifacts art;
  art.manifest = req.out / "manifest.json";
  fs::create_directories(req.out);

  const ModelParams p = sc.params();
  const Equilibrium eq = equilibrium(p);

  auto save = [&](const Trajectory& t, const std::string& tag) {
    const fs::path path = req.out / ("trajectory_" + tag + ".csv");
    export_trajectory(t, p, path, sc.stride);
    art.trajectories.push_back(path);
    auto plots = write_plots(t, sc, eq, req.out, tag);
    art.plots.insert(art.plots.end(), plots.begin(), plots.end());
  };

  auto do_analysis = [&] {
    const auto [amp, k] = cosine_parameters(sc);
    AnalysisConfig cfg;
    cfg.intervals = sc.cells;
    cfg.dt = sc.dt;
    const AnalysisOutcome a = analyze(p, sc.gain, cfg, amp, k);
    art.analysis_report = req.out / "analysis.json";
    write_json(*art.analysis_report, to_json(a));
    if (!a.certificates_ok()) art.exit_code = 4;
  };

  auto do_compare = [&] {
    const ComparePair pair = run_pair(sc);
    save(pair.open, "open");
    save(pair.closed, "closed");
    const MetricsReport r = compare(pair.open, pair.closed, sc.fuel);
    art.metrics_report = req.out / "metrics.json";
    json j = to_json(r);
    j["equilibrium"] = to_json(eq);
    write_json(*art.metrics_report, j);
  };

  switch (req.command) {
    case Cmd::Simulate: {
      if (sc.mode == RunMode::Compare) {
        const ComparePair pair = run_pair(sc);
        save(pair.open, "open");
        save(pair.closed, "closed");
      } else {
        const bool closed = sc.mode == RunMode::Closed;
        save(run_single(sc, closed), closed ? "closed" : "open");
      }
      break;
    }
    case Cmd::Analyze:
      do_analysis();
      break;
    case Cmd::Metrics: {
      if (sc.mode == RunMode::Compare) {
        do_compare();
        break;
      }
      const bool closed = sc.mode == RunMode::Closed;
      const Trajectory t = req.trajectory ? import_trajectory(*req.trajectory)
                                          : run_single(sc, closed);
      json j = to_json(evaluate(t, sc.fuel));
      j["fuel_units"] = sc.fuel.units;
      j["source"] = req.trajectory ? req.trajectory->string()
                                   : std::string(to_string(sc.mode));
      art.metrics_report = req.out / "metrics.json";
      write_json(*art.metrics_report, j);
      break;
    }
    case Cmd::Compare:
      do_compare();
      break;
    case Cmd::ReproducePaper:
      do_compare();
      do_analysis();
      break;
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(sc, req, art, elapsed);
  return art;
}

std::vector<InvariantCheck> seed_check(const Scenario& sc) {
  std::vector<InvariantCheck> out;
  const ModelParams p = sc.params();
  const Equilibrium eq = equilibrium(p);
  Grid grid = sc.grid();

  {
    Grid g = grid;
    g.T = std::min(g.T, 50.0);
    const TrafficState init = initial_state(sc, p, eq, g);
    const Trajectory t = simulate(p, g, init, OpenLoop{});
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < t.size(); ++n) {
      const auto& b = t.states[n].boundary;
      const double m0 = t.diagnostics[n].mass;
      const double expected = m0 + g.dt * (p.q_in() - b.rho_out * b.v_out);
      worst = std::max(worst,
                       std::abs(t.diagnostics[n + 1].mass - expected) / m0);
    }
    out.push_back({"mass_balance_relative", worst, 1e-10, worst <= 1e-10});
  }
  {
    Grid g = grid;
    g.T = g.dt * 1e4;
    SolverOptions opts;
    opts.record_every = 10000;
    const Trajectory t =
        simulate(p, g, equilibrium_state(p, eq, g), OpenLoop{}, opts);
    double drift = 0.0;
    const auto& last = t.states.back();
    for (std::size_t i = 0; i < last.size(); ++i) {
      drift = std::max({drift, std::abs(last.rho[i] - eq.rho_bar) / eq.rho_bar,
                        std::abs(last.v[i] - eq.v_bar) / eq.v_bar});
    }
    out.push_back({"equilibrium_drift_relative", drift, 1e-10, drift <= 1e-10});
  }
  {
    Scenario s = sc;
    s.T = std::min(s.T, 20.0);
    const std::string a = trajectory_csv(run_single(s, true), p);
    const std::string b = trajectory_csv(run_single(s, true), p);
    const double same = a == b ? 1.0 : 0.0;
    out.push_back({"deterministic_csv", same, 1.0, a == b});
  }
  return out;
}

}  // namespace tgflow
