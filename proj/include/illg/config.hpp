#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "illg/grid.hpp"
#include "illg/krylov.hpp"
#include "illg/physics.hpp"

namespace illg {

/// Parse failure or invariant violation; the message lists every violated
/// field, not just the first.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Relax, Pulse, Hysteresis, Verify };

[[nodiscard]] ScenarioKind parse_scenario(const std::string& name);
[[nodiscard]] std::string scenario_name(ScenarioKind s);

struct OutputConfig {
  std::string dir = ".";
  long cadence = 100;           // steps between time-series records
  long snapshot_cadence = 0;    // 0: only initial and final snapshots
};

struct SteadyConfig {
  double rel_tol = 1.0e-7;  // |F_now - F_prev| <= rel_tol * |F_now| stops the run
  long check_every = 100;
  bool stop_when_steady = true;
};

enum class LoopAxis { Long, Short };

struct HysteresisConfig {
  LoopAxis axis = LoopAxis::Short;
  double canting_deg = 1.0;   // in-plane rotation of the sweep direction
  double field_min = -0.05;   // T
  double field_max = 0.05;    // T
  int n_field_steps = 101;    // per branch, endpoints included
  double steady_rel_tol = 1.0e-7;
  long max_steps_per_field = 20000;
};

struct VerifyCase {
  double alpha = 0.0;
  double eta = 0.0;
};

/// Which manufactured-solution sweeps the verify scenario runs. Defaults
/// reproduce the full reference tables.
struct VerifyConfig {
  std::vector<std::string> sweeps = {"1d_time", "1d_space", "3d_time", "3d_space"};
  std::vector<VerifyCase> cases_1d = {{0.0, 0.0}, {0.01, 0.0}, {0.01, 100.0}, {0.01, 1000.0}};
  std::vector<VerifyCase> cases_3d = {{0.01, 1000.0}};
  std::vector<int> nt = {20, 40, 80, 160};    // temporal refinements
  std::vector<int> nx = {20, 40, 80, 160};    // 1d spatial refinements
  std::vector<int> n3d = {6, 8, 10, 12};      // 3d spatial refinements
};

struct InitialState {
  enum class Kind { Uniform, Random, File };
  Kind kind = Kind::Uniform;
  Vec3 direction{1.0, 0.0, 0.0};  // Uniform only; unit
  std::string path;               // File only
};

/// Fully validated run description. SI quantities live on the left, the
/// derived dimensionless quantities (grid, groups, timestep) on the right of
/// load_config; scenarios consume only the derived ones plus the SI output
/// scales.
struct SimulationConfig {
  ScenarioKind scenario = ScenarioKind::Relax;
  MaterialParams material;
  Vec3 box{};      // m
  Vec3 cell{};     // m
  EasyAxis easy_axis = EasyAxis::X;
  double dt_phys = 0.0;   // s
  double duration = 0.0;  // s
  AppliedFieldSpec applied;  // dimensionless amplitudes, physical times
  InitialState initial;
  bool stray_field_enabled = true;
  KrylovConfig solver;
  OutputConfig output;
  SteadyConfig steady;
  HysteresisConfig hysteresis;
  VerifyConfig verify;
  std::uint64_t seed = 1;

  // Derived at load time.
  Grid grid;
  DimensionlessParams nd;
  double dt = 0.0;           // dimensionless
  long n_steps = 0;          // round(duration / dt_phys)
  double length_unit = 0.0;  // m, longest box edge
  double energy_unit = 0.0;  // J, mu0 * Ms^2 * length_unit^3
};

/// Reads a JSON config (// comments allowed), applies the optional scenario
/// override before validation, checks every invariant, and converts SI
/// inputs to the dimensionless groups. Throws ConfigError with an exhaustive
/// list of problems. Material/geometry/time sections are not required by the
/// verify scenario.
[[nodiscard]] SimulationConfig load_config(const std::string& path,
                                           const std::string& scenario_override = "");

}  // namespace illg
