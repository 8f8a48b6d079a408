#include "illg/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace illg {

namespace {

using nlohmann::json;

struct Collector {
  std::vector<std::string> errs;

  void add(std::string msg) { errs.push_back(std::move(msg)); }
  [[nodiscard]] bool ok() const { return errs.empty(); }
};

template <typename T>
T get_field(const json& j, const std::string& path, const char* key, const T& def,
            bool required, Collector& c) {
  if (!j.contains(key)) {
    if (required) c.add("missing field: " + path + key);
    return def;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    c.add("bad value for " + path + key + ": " + e.what());
    return def;
  }
}

Vec3 get_vec3(const json& j, const std::string& path, const char* key, const Vec3& def,
              bool required, Collector& c) {
  if (!j.contains(key)) {
    if (required) c.add("missing field: " + path + key);
    return def;
  }
  try {
    auto a = j.at(key).get<std::array<double, 3>>();
    return {a[0], a[1], a[2]};
  } catch (const json::exception& e) {
    c.add("bad value for " + path + key + " (want 3 numbers): " + e.what());
    return def;
  }
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed, Collector& c) {
  if (!j.is_object()) return;
  for (const auto& item : j.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return item.key() == k; });
    if (!known) c.add("unknown field: " + path + item.key());
  }
}

/// box = n * cell to 1e-9 relative, n >= 1.
int divide_extent(double box, double cell, const char* axis, Collector& c) {
  if (!(box > 0.0) || !(cell > 0.0)) {
    c.add(std::string("geometry: box and cell must be positive along ") + axis);
    return 1;
  }
  double ratio = box / cell;
  double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1.0e-9 * ratio) {
    c.add(std::string("geometry: cell does not divide box along ") + axis + " (box/cell = " +
          std::to_string(ratio) + ")");
    return 1;
  }
  return static_cast<int>(rounded);
}

void parse_material(const json& root, bool required, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("material")) {
    if (required) c.add("missing section: material");
    return;
  }
  const json& m = root.at("material");
  check_keys(m, "material.", {"Ms", "A", "Ku", "alpha", "tau", "gamma", "mu0"}, c);
  MaterialParams& mat = cfg.material;
  mat.Ms = get_field(m, "material.", "Ms", 0.0, required, c);
  mat.A_ex = get_field(m, "material.", "A", 0.0, required, c);
  mat.Ku = get_field(m, "material.", "Ku", 0.0, false, c);
  mat.alpha = get_field(m, "material.", "alpha", 0.0, required, c);
  mat.tau = get_field(m, "material.", "tau", 0.0, required, c);
  mat.gamma = get_field(m, "material.", "gamma", mat.gamma, false, c);
  mat.mu0 = get_field(m, "material.", "mu0", mat.mu0, false, c);
  if (!required) return;
  if (!(mat.Ms > 0.0)) c.add("material.Ms must be positive");
  if (mat.A_ex < 0.0) c.add("material.A must be nonnegative");
  if (mat.Ku < 0.0) c.add("material.Ku must be nonnegative");
  if (mat.alpha < 0.0) c.add("material.alpha must be nonnegative");
  if (mat.tau < 0.0) c.add("material.tau must be nonnegative");
  if (!(mat.gamma > 0.0)) c.add("material.gamma must be positive");
  if (!(mat.mu0 > 0.0)) c.add("material.mu0 must be positive");
}

void parse_geometry(const json& root, bool required, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("geometry")) {
    if (required) c.add("missing section: geometry");
    return;
  }
  const json& g = root.at("geometry");
  check_keys(g, "geometry.", {"box", "cell", "easy_axis"}, c);
  cfg.box = get_vec3(g, "geometry.", "box", {}, required, c);
  cfg.cell = get_vec3(g, "geometry.", "cell", {}, required, c);
  std::string ax = get_field<std::string>(g, "geometry.", "easy_axis", "x", false, c);
  if (ax == "x")
    cfg.easy_axis = EasyAxis::X;
  else if (ax == "y")
    cfg.easy_axis = EasyAxis::Y;
  else if (ax == "z")
    cfg.easy_axis = EasyAxis::Z;
  else
    c.add("geometry.easy_axis must be one of x|y|z");
}

void parse_time(const json& root, bool required, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("time")) {
    if (required) c.add("missing section: time");
    return;
  }
  const json& t = root.at("time");
  check_keys(t, "time.", {"dt", "duration"}, c);
  cfg.dt_phys = get_field(t, "time.", "dt", 0.0, required, c);
  cfg.duration = get_field(t, "time.", "duration", 0.0, required, c);
  if (!required) return;
  if (!(cfg.dt_phys > 0.0)) c.add("time.dt must be positive");
  if (cfg.duration < cfg.dt_phys) c.add("time.duration must be at least time.dt");
}

void parse_applied(const json& root, bool convert, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("applied")) return;
  const json& a = root.at("applied");
  check_keys(a, "applied.", {"constant", "pulse", "canting_deg"}, c);
  // Field inputs are in tesla; units of Ms inside.
  double scale = convert ? 1.0 / (cfg.material.mu0 * cfg.material.Ms) : 0.0;
  Vec3 b = get_vec3(a, "applied.", "constant", {}, false, c);
  cfg.applied.constant = {b.x * scale, b.y * scale, b.z * scale};
  if (a.contains("canting_deg")) {
    double deg = get_field(a, "applied.", "canting_deg", 0.0, false, c);
    cfg.applied.canting_deg = deg;
    double th = deg * std::acos(-1.0) / 180.0;
    Vec3 h = cfg.applied.constant;
    cfg.applied.constant = {h.x * std::cos(th) - h.y * std::sin(th),
                            h.x * std::sin(th) + h.y * std::cos(th), h.z};
  }
  if (!a.contains("pulse")) return;
  const json& p = a.at("pulse");
  check_keys(p, "applied.pulse.", {"amplitude", "frequency", "direction", "window"}, c);
  double amp = get_field(p, "applied.pulse.", "amplitude", 0.0, true, c);
  cfg.applied.pulse_amplitude = amp * scale;
  cfg.applied.pulse_frequency = get_field(p, "applied.pulse.", "frequency", 0.0, true, c);
  Vec3 d = get_vec3(p, "applied.pulse.", "direction", {}, true, c);
  double dn = norm(d);
  if (dn < 1.0e-12) {
    if (amp != 0.0) c.add("applied.pulse.direction must be nonzero");
  } else {
    cfg.applied.pulse_direction = {d.x / dn, d.y / dn, d.z / dn};
  }
  if (p.contains("window")) {
    try {
      auto w = p.at("window").get<std::array<double, 2>>();
      cfg.applied.window_start = w[0];
      cfg.applied.window_end = w[1];
      if (!(w[0] <= w[1])) c.add("applied.pulse.window must be ordered [start, end]");
    } catch (const json::exception& e) {
      c.add(std::string("bad value for applied.pulse.window (want 2 numbers): ") + e.what());
    }
  } else if (amp != 0.0) {
    c.add("missing field: applied.pulse.window");
  }
}

void parse_initial(const json& root, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("initial_m")) return;
  const json& im = root.at("initial_m");
  if (im.is_string()) {
    std::string s = im.get<std::string>();
    if (s == "uniform_x")
      cfg.initial = {InitialState::Kind::Uniform, {1.0, 0.0, 0.0}, ""};
    else if (s == "uniform_y")
      cfg.initial = {InitialState::Kind::Uniform, {0.0, 1.0, 0.0}, ""};
    else if (s == "uniform_z")
      cfg.initial = {InitialState::Kind::Uniform, {0.0, 0.0, 1.0}, ""};
    else if (s == "random")
      cfg.initial.kind = InitialState::Kind::Random;
    else if (s.rfind("file:", 0) == 0) {
      cfg.initial.kind = InitialState::Kind::File;
      cfg.initial.path = s.substr(5);
      if (cfg.initial.path.empty()) c.add("initial_m: empty file path");
    } else {
      c.add("initial_m must be uniform_x|uniform_y|uniform_z|random|file:PATH or a 3-vector");
    }
  } else {
    Vec3 d = get_vec3(root, "", "initial_m", {1.0, 0.0, 0.0}, false, c);
    double dn = norm(d);
    if (dn < 1.0e-12) {
      c.add("initial_m vector must be nonzero");
    } else {
      cfg.initial = {InitialState::Kind::Uniform, {d.x / dn, d.y / dn, d.z / dn}, ""};
    }
  }
}

void parse_solver(const json& root, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("solver")) return;
  const json& s = root.at("solver");
  check_keys(s, "solver.", {"tol", "restart", "max_iters"}, c);
  cfg.solver.tol = get_field(s, "solver.", "tol", cfg.solver.tol, false, c);
  cfg.solver.restart = get_field(s, "solver.", "restart", cfg.solver.restart, false, c);
  cfg.solver.max_iters = get_field(s, "solver.", "max_iters", cfg.solver.max_iters, false, c);
  if (!(cfg.solver.tol > 0.0)) c.add("solver.tol must be positive");
  if (cfg.solver.restart < 1) c.add("solver.restart must be at least 1");
  if (cfg.solver.max_iters < 1) c.add("solver.max_iters must be at least 1");
}

void parse_output(const json& root, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("output")) return;
  const json& o = root.at("output");
  check_keys(o, "output.", {"dir", "cadence", "snapshot_cadence"}, c);
  cfg.output.dir = get_field<std::string>(o, "output.", "dir", cfg.output.dir, false, c);
  cfg.output.cadence = get_field<long>(o, "output.", "cadence", cfg.output.cadence, false, c);
  cfg.output.snapshot_cadence =
      get_field<long>(o, "output.", "snapshot_cadence", cfg.output.snapshot_cadence, false, c);
  if (cfg.output.cadence < 1) c.add("output.cadence must be at least 1");
  if (cfg.output.snapshot_cadence < 0) c.add("output.snapshot_cadence must be nonnegative");
}

void parse_steady(const json& root, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("steady")) return;
  const json& s = root.at("steady");
  check_keys(s, "steady.", {"rel_tol", "check_every", "stop_when_steady"}, c);
  cfg.steady.rel_tol = get_field(s, "steady.", "rel_tol", cfg.steady.rel_tol, false, c);
  cfg.steady.check_every =
      get_field<long>(s, "steady.", "check_every", cfg.steady.check_every, false, c);
  cfg.steady.stop_when_steady =
      get_field(s, "steady.", "stop_when_steady", cfg.steady.stop_when_steady, false, c);
  if (!(cfg.steady.rel_tol > 0.0)) c.add("steady.rel_tol must be positive");
  if (cfg.steady.check_every < 1) c.add("steady.check_every must be at least 1");
}

void parse_hysteresis(const json& root, SimulationConfig& cfg, Collector& c) {
  if (!root.contains("hysteresis")) return;
  const json& h = root.at("hysteresis");
  check_keys(h, "hysteresis.",
             {"axis", "canting_deg", "field_min", "field_max", "n_field_steps",
              "steady_rel_tol", "max_steps_per_field"},
             c);
  HysteresisConfig& hc = cfg.hysteresis;
  std::string ax = get_field<std::string>(h, "hysteresis.", "axis", "short", false, c);
  if (ax == "long")
    hc.axis = LoopAxis::Long;
  else if (ax == "short")
    hc.axis = LoopAxis::Short;
  else
    c.add("hysteresis.axis must be long|short");
  hc.canting_deg = get_field(h, "hysteresis.", "canting_deg", hc.canting_deg, false, c);
  hc.field_min = get_field(h, "hysteresis.", "field_min", hc.field_min, false, c);
  hc.field_max = get_field(h, "hysteresis.", "field_max", hc.field_max, false, c);
  hc.n_field_steps = get_field(h, "hysteresis.", "n_field_steps", hc.n_field_steps, false, c);
  hc.steady_rel_tol =
      get_field(h, "hysteresis.", "steady_rel_tol", hc.steady_rel_tol, false, c);
  hc.max_steps_per_field =
      get_field<long>(h, "hysteresis.", "max_steps_per_field", hc.max_steps_per_field, false, c);
  if (!(hc.field_min < hc.field_max)) c.add("hysteresis.field_min must be below field_max");
  if (hc.n_field_steps < 2) c.add("hysteresis.n_field_steps must be at least 2");
  if (!(hc.steady_rel_tol > 0.0)) c.add("hysteresis.steady_rel_tol must be positive");
  if (hc.max_steps_per_field < 1) c.add("hysteresis.max_steps_per_field must be at least 1");
}

void parse_verify(const json& root, SimulationConfig& cfg, Collector& c) {
  if (root.contains("verify")) {
    const json& v = root.at("verify");
    check_keys(v, "verify.", {"sweeps", "cases_1d", "cases_3d", "nt", "nx", "n3d"}, c);
    VerifyConfig& vc = cfg.verify;
    vc.sweeps = get_field(v, "verify.", "sweeps", vc.sweeps, false, c);
    auto get_cases = [&](const char* key, std::vector<VerifyCase>& out) {
      if (!v.contains(key)) return;
      try {
        auto raw = v.at(key).get<std::vector<std::array<double, 2>>>();
        out.clear();
        for (const auto& r : raw) {
          if (r[0] < 0.0 || r[1] < 0.0)
            c.add(std::string("verify.") + key + ": alpha and eta must be nonnegative");
          out.push_back({r[0], r[1]});
        }
        if (out.empty()) c.add(std::string("verify.") + key + " must not be empty");
      } catch (const json::exception& e) {
        c.add(std::string("bad value for verify.") + key + " (want [[alpha, eta], ...]): " +
              e.what());
      }
    };
    get_cases("cases_1d", vc.cases_1d);
    get_cases("cases_3d", vc.cases_3d);
    vc.nt = get_field(v, "verify.", "nt", vc.nt, false, c);
    vc.nx = get_field(v, "verify.", "nx", vc.nx, false, c);
    vc.n3d = get_field(v, "verify.", "n3d", vc.n3d, false, c);
  }
  if (cfg.scenario != ScenarioKind::Verify) return;
  for (const std::string& s : cfg.verify.sweeps) {
    if (s != "1d_time" && s != "1d_space" && s != "3d_time" && s != "3d_space") {
      c.add("verify.sweeps: unknown sweep '" + s + "'");
      continue;
    }
    // Order fits need at least two resolutions.
    const std::vector<int>* res = &cfg.verify.nt;
    if (s == "1d_space") res = &cfg.verify.nx;
    if (s == "3d_space") res = &cfg.verify.n3d;
    if (res->size() < 2) c.add("verify: sweep '" + s + "' needs at least 2 resolutions");
    for (int n : *res)
      if (n < 2) c.add("verify: sweep '" + s + "' has a resolution below 2");
  }
}

}  // namespace

ScenarioKind parse_scenario(const std::string& name) {
  if (name == "relax") return ScenarioKind::Relax;
  if (name == "pulse") return ScenarioKind::Pulse;
  if (name == "hysteresis") return ScenarioKind::Hysteresis;
  if (name == "verify") return ScenarioKind::Verify;
  throw ConfigError("unknown scenario '" + name + "' (expected relax|pulse|hysteresis|verify)");
}

std::string scenario_name(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::Relax: return "relax";
    case ScenarioKind::Pulse: return "pulse";
    case ScenarioKind::Hysteresis: return "hysteresis";
    case ScenarioKind::Verify: return "verify";
  }
  return "?";
}

SimulationConfig load_config(const std::string& path, const std::string& scenario_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config " + path + ": cannot open");
  json root;
  try {
    root = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config " + path + ": top level must be an object");

  Collector c;
  SimulationConfig cfg;

  check_keys(root, "",
             {"scenario", "material", "geometry", "time", "applied", "initial_m", "stray_field",
              "solver", "output", "steady", "hysteresis", "verify", "seed"},
             c);

  std::string scen = get_field<std::string>(root, "", "scenario", "relax", true, c);
  if (!scenario_override.empty()) scen = scenario_override;
  try {
    cfg.scenario = parse_scenario(scen);
  } catch (const ConfigError& e) {
    c.add(e.what());
  }
  const bool physics = cfg.scenario != ScenarioKind::Verify;

  parse_material(root, physics, cfg, c);
  parse_geometry(root, physics, cfg, c);
  parse_time(root, physics, cfg, c);
  bool convert = physics && cfg.material.Ms > 0.0 && cfg.material.mu0 > 0.0;
  parse_applied(root, convert, cfg, c);
  parse_initial(root, cfg, c);
  cfg.stray_field_enabled = get_field(root, "", "stray_field", true, false, c);
  parse_solver(root, cfg, c);
  parse_output(root, cfg, c);
  parse_steady(root, cfg, c);
  parse_hysteresis(root, cfg, c);
  parse_verify(root, cfg, c);
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0))
      cfg.seed = s.get<std::uint64_t>();
    else
      c.add("seed must be a nonnegative integer");
  }

  if (physics && c.ok()) {
    int nx = divide_extent(cfg.box.x, cfg.cell.x, "x", c);
    int ny = divide_extent(cfg.box.y, cfg.cell.y, "y", c);
    int nz = divide_extent(cfg.box.z, cfg.cell.z, "z", c);
    if (c.ok()) {
      cfg.length_unit = std::max({cfg.box.x, cfg.box.y, cfg.box.z});
      cfg.grid = Grid(nx, ny, nz, cfg.cell.x / cfg.length_unit, cfg.cell.y / cfg.length_unit,
                      cfg.cell.z / cfg.length_unit);
      Nondimensional nd = nondimensionalize(cfg.material, cfg.length_unit, cfg.dt_phys);
      cfg.nd = nd.params;
      cfg.dt = nd.dt;
      cfg.n_steps = std::max(1L, std::lround(cfg.duration / cfg.dt_phys));
      cfg.energy_unit = cfg.material.mu0 * cfg.material.Ms * cfg.material.Ms *
                        cfg.length_unit * cfg.length_unit * cfg.length_unit;
    }
  }

  if (!c.ok()) {
    std::string msg = "config " + path + ": " + std::to_string(c.errs.size()) + " problem(s)";
    for (const std::string& e : c.errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

}  // namespace illg
