#include "tgflow/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tgflow/errors.hpp"

namespace tgflow {

namespace {

using json = nlohmann::json;

struct Unit {
  Dimension dim;
  double factor;  // SI value of one unit
};

const std::map<std::string, Unit, std::less<>>& unit_table() {
  static const std::map<std::string, Unit, std::less<>> table = {
      {"m", {Dimension::Length, 1.0}},
      {"km", {Dimension::Length, 1000.0}},
      {"s", {Dimension::Time, 1.0}},
      {"min", {Dimension::Time, 60.0}},
      {"h", {Dimension::Time, 3600.0}},
      {"m/s", {Dimension::Speed, 1.0}},
      {"km/h", {Dimension::Speed, 1.0 / 3.6}},
      {"veh/m", {Dimension::Density, 1.0}},
      {"veh/km", {Dimension::Density, 1e-3}},
      {"veh/s", {Dimension::Flow, 1.0}},
      {"veh/h", {Dimension::Flow, 1.0 / 3600.0}},
      {"1/s", {Dimension::Rate, 1.0}},
      {"s^-1", {Dimension::Rate, 1.0}},
      {"-", {Dimension::None, 1.0}},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + byte, '\n'));
}

// Field readers. `where` is the dotted path used in error messages.
class Reader {
 public:
  Reader(const json& obj, std::string where)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) {
      throw ConfigError(where_ + ": expected an object");
    }
  }

  void quantity(const char* key, Dimension dim, double& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    try {
      if (v.is_number()) {
        out = v.get<double>();
      } else if (v.is_string()) {
        out = parse_quantity(v.get<std::string>(), dim);
      } else {
        throw ConfigError("expected a number or a quantity string");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(path(key) + ": " + e.what());
    }
    if (!std::isfinite(out)) throw ConfigError(path(key) + ": not finite");
  }

  void optional_quantity(const char* key, Dimension dim,
                         std::optional<double>& out) {
    if (obj_.contains(key)) {
      double v = 0.0;
      quantity(key, dim, v);
      out = v;
    }
    seen_.insert(key);
  }

  void count(const char* key, std::size_t& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ConfigError(path(key) + ": expected a positive integer");
    }
    out = v.get<std::size_t>();
  }

  std::optional<std::string> text(const char* key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  std::string path(std::string_view key) const {
    return where_.empty() ? std::string(key) : where_ + "." + std::string(key);
  }

  void reject_unknown() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(path(key) + ": unknown field");
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

void read_model(const json& node, ModelConfig& m) {
  Reader r(node, "model");
  r.quantity("q_in", Dimension::Flow, m.q_in);
  r.quantity("D", Dimension::Length, m.D);
  r.quantity("L", Dimension::Length, m.L);
  r.quantity("alpha", Dimension::None, m.alpha);
  r.quantity("tau_acc", Dimension::Time, m.tau_acc);
  r.quantity("tau_m", Dimension::Time, m.tau_m);
  r.quantity("h_m", Dimension::Time, m.h_m);
  r.quantity("h_acc_bar", Dimension::Time, m.h_acc_bar);
  r.quantity("v_f", Dimension::Speed, m.v_f);
  r.quantity("h_max", Dimension::Time, m.h_max);
  r.quantity("rho_min", Dimension::Density, m.rho_min);
  r.optional_quantity("h_min", Dimension::Time, m.h_min);
  r.reject_unknown();
}

void read_grid(const json& node, Scenario& s) {
  Reader r(node, "grid");
  r.count("cells", s.cells);
  r.quantity("dt", Dimension::Time, s.dt);
  r.quantity("T", Dimension::Time, s.T);
  if (auto ex = r.text("extrapolation")) {
    if (*ex == "constant") {
      s.extrapolation = Extrapolation::Constant;
    } else if (*ex == "linear") {
      s.extrapolation = Extrapolation::Linear;
    } else {
      throw ConfigError("grid.extrapolation: expected constant or linear");
    }
  }
  r.reject_unknown();
}

void read_initial(const json& node, Scenario& s) {
  Reader r(node, "initial");
  const std::string kind = r.text("kind").value_or("cosine");
  if (kind == "equilibrium") {
    s.initial = EquilibriumInit{};
  } else if (kind == "cosine") {
    CosineInit c;
    r.quantity("amplitude", Dimension::Density, c.amplitude);
    std::optional<double> cycles;
    r.optional_quantity("cycles", Dimension::None, cycles);
    std::optional<double> k;
    r.optional_quantity("wavenumber", Dimension::None, k);
    if (cycles && k) {
      throw ConfigError("initial: give either cycles or wavenumber");
    }
    if (cycles) c.wavenumber = 2.0 * std::numbers::pi * *cycles / s.model.D;
    if (k) c.wavenumber = *k;
    s.initial = c;
  } else if (kind == "file") {
    auto path = r.text("path");
    if (!path) throw ConfigError("initial.path: required for kind file");
    s.initial = FileInit{*path};
  } else {
    throw ConfigError("initial.kind: expected equilibrium, cosine or file");
  }
  r.reject_unknown();
}

void read_fuel(const json& node, FuelCoeffs& f) {
  Reader r(node, "fuel");
  r.quantity("b0", Dimension::None, f.b0);
  r.quantity("b1", Dimension::None, f.b1);
  r.quantity("b3", Dimension::None, f.b3);
  r.quantity("b4", Dimension::None, f.b4);
  if (auto u = r.text("units")) f.units = *u;
  r.reject_unknown();
}

void read_output(const json& node, Scenario& s) {
  Reader r(node, "output");
  r.count("stride", s.stride);
  if (const json* plots = r.child("plots")) {
    if (!plots->is_array()) throw ConfigError("output.plots: expected a list");
    s.plots.clear();
    for (const json& p : *plots) {
      if (!p.is_string()) throw ConfigError("output.plots: expected strings");
      try {
        s.plots.push_back(parse_plot_kind(p.get<std::string>()));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("output.plots: ") + e.what());
      }
    }
  }
  r.reject_unknown();
}

}  // namespace

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::None: return "dimensionless";
    case Dimension::Length: return "length";
    case Dimension::Time: return "time";
    case Dimension::Speed: return "speed";
    case Dimension::Density: return "density";
    case Dimension::Flow: return "flow";
    case Dimension::Rate: return "rate";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension expected) {
  text = trim(text);
  const std::string buf(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot read a number from '" + buf + "'");
  }
  const std::string_view unit = trim(text.substr(used));
  if (unit.empty()) return value;
  const auto& table = unit_table();
  const auto it = table.find(unit);
  if (it == table.end()) {
    throw ConfigError("unknown unit '" + std::string(unit) + "'");
  }
  if (it->second.dim != expected) {
    throw ConfigError("unit '" + std::string(unit) + "' is a " +
                      std::string(to_string(it->second.dim)) + ", expected " +
                      std::string(to_string(expected)));
  }
  return value * it->second.factor;
}

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::Open: return "open";
    case RunMode::Closed: return "closed";
    case RunMode::Compare: return "compare";
  }
  return "?";
}

RunMode parse_run_mode(std::string_view s) {
  if (s == "open") return RunMode::Open;
  if (s == "closed") return RunMode::Closed;
  if (s == "compare") return RunMode::Compare;
  throw ValidationError("unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::Surface: return "surface";
    case PlotKind::Timeseries: return "timeseries";
    case PlotKind::ControlField: return "control-field";
  }
  return "?";
}

PlotKind parse_plot_kind(std::string_view s) {
  if (s == "surface") return PlotKind::Surface;
  if (s == "timeseries") return PlotKind::Timeseries;
  if (s == "control-field") return PlotKind::ControlField;
  throw ValidationError("unknown plot kind '" + std::string(s) + "'");
}

ModelParams Scenario::params() const { return ModelParams(model); }

Grid Scenario::grid() const {
  if (!(dt > 0.0) || !(T > 0.0)) {
    throw ValidationError("grid: dt and T must be positive");
  }
  return Grid::over(model.D, cells, dt, T);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  s.source_hash = fnv1a(text);
  if (trim(text).empty()) {
    s.params();
    return s;
  }

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error at line " +
                      std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }

  Reader top(doc, "");
  if (const json* m = top.child("model")) read_model(*m, s.model);
  if (const json* g = top.child("grid")) read_grid(*g, s);
  if (const json* i = top.child("initial")) read_initial(*i, s);
  if (auto mode = top.text("mode")) {
    try {
      s.mode = parse_run_mode(*mode);
    } catch (const ValidationError&) {
      throw ConfigError("mode: expected open, closed or compare");
    }
  }
  top.quantity("gain", Dimension::Rate, s.gain);
  if (const json* f = top.child("fuel")) read_fuel(*f, s.fuel);
  if (const json* o = top.child("output")) read_output(*o, s);
  top.reject_unknown();

  // Surface invariant violations at load time rather than mid-run.
  s.params();
  s.grid();
  s.fuel.validate();
  if (!(s.gain > 0.0)) throw ValidationError("gain: must be positive");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace tgflow
