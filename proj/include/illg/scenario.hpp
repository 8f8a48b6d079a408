#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "illg/config.hpp"
#include "illg/stepper.hpp"

namespace illg {

/// One row of timeseries.csv. Time and energies are SI; step 0 is the
/// initial state.
struct TimeSeriesRecord {
  long step = 0;
  double t = 0.0;  // s
  Vec3 m_avg{};
  double F = 0.0;  // J
  double J = 0.0;  // J
  int gmres_iters = 0;
};

struct RunResult {
  std::vector<TimeSeriesRecord> records;
  SolverState state;  // final level pair
  bool reached_steady = false;
  long final_step = 0;
};

struct HysteresisPoint {
  double field_T = 0.0;
  Vec3 m_avg{};
  long steps = 0;  // relaxation steps spent at this field value
  bool steady = false;
};

struct HysteresisResult {
  std::vector<HysteresisPoint> points;  // descending branch, then ascending
  std::size_t branch_start = 0;         // index of the first ascending point
  double coercive_T = 0.0;  // mean |field| over the loop-axis sign changes
  Vec3 remanence{};         // <m> at the descending branch's zero-field point
  double loop_closure = 0.0;  // |<m>_first - <m>_last|, both at field_max
  Vec3 loop_dir{};            // canted sweep direction actually applied
};

/// One resolution of one manufactured-solution sweep; order is the sweep's
/// least-squares fit, repeated on each of its rows.
struct ConvergenceRow {
  std::string sweep;
  double alpha = 0.0;
  double eta = 0.0;
  double resolution = 0.0;  // dt for temporal sweeps, dx for spatial ones
  double error = 0.0;       // L_inf against the exact solution at final time
  double order = 0.0;
};

/// Scenario runners. outdir = "" suppresses all file output (results are
/// still returned); audit checks the unit-norm and dot-product invariants
/// after every step and throws SolverError on violation.
///
/// relax: steps to duration or steady state (LL-energy change below
/// steady.rel_tol between consecutive checks); writes timeseries.csv and
/// snapshots. pulse: same loop, never stops early. hysteresis: sweeps the
/// applied field from field_max down to field_min and back, re-relaxing to
/// steady state at each value from the previous endpoint; writes
/// hysteresis.csv; a field value that fails to settle within
/// max_steps_per_field is recorded as-is and the sweep continues. verify:
/// runs the configured manufactured-solution sweeps; writes convergence.csv.
[[nodiscard]] RunResult run_relaxation(const SimulationConfig& cfg, const std::string& outdir,
                                       bool audit);
[[nodiscard]] RunResult run_pulse(const SimulationConfig& cfg, const std::string& outdir,
                                  bool audit);
[[nodiscard]] HysteresisResult run_hysteresis(const SimulationConfig& cfg,
                                              const std::string& outdir, bool audit);
[[nodiscard]] std::vector<ConvergenceRow> run_verification(const SimulationConfig& cfg,
                                                           const std::string& outdir);

/// CSV writers (17 significant digits; headers fixed by the file contracts).
void write_timeseries_csv(const std::vector<TimeSeriesRecord>& rows, const std::string& path);
void write_hysteresis_csv(const std::vector<HysteresisPoint>& rows, const std::string& path);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);

/// Initial state per config: uniform direction, per-cell isotropic random
/// unit vectors from mt19937_64(seed), or a snapshot file (grid must match).
[[nodiscard]] VectorField initial_magnetization(const SimulationConfig& cfg);

}  // namespace illg
