#include "illg/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>

#include "illg/demag.hpp"
#include "illg/energy.hpp"
#include "illg/snapshot.hpp"
#include "illg/verify.hpp"

namespace illg {

namespace {

constexpr double kUnitNormTol = 1.0e-13;

struct CsvFile {
  std::FILE* f = nullptr;

  CsvFile(const std::string& path) {
    f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  }
  ~CsvFile() {
    if (f) std::fclose(f);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;
};

Vec3 applied_at(const SimulationConfig& cfg, const AppliedFieldSpec& spec, double t_dimless) {
  return applied_field_at(t_dimless * cfg.nd.t_unit, spec);
}

EnergyReport energies_at(const SimulationConfig& cfg, const AppliedFieldSpec& spec,
                         const SolverState& s, double t_dimless, const DemagKernel* kernel) {
  VectorField hs;
  const VectorField* hsp = nullptr;
  if (kernel) {
    hs = stray_field(*kernel, s.m_curr);
    hsp = &hs;
  }
  EnergyReport free = ll_energy(s.m_curr, cfg.nd.epsilon, cfg.nd.q, cfg.easy_axis,
                                applied_at(cfg, spec, t_dimless), hsp, cfg.energy_unit);
  return total_energy(free, s.m_curr, s.m_prev, s.dt, cfg.material.alpha, cfg.nd.eta);
}

TimeSeriesRecord make_record(const SimulationConfig& cfg, const SolverState& s,
                             const EnergyReport& e, long step_label, double t_dimless,
                             int iters) {
  return {step_label, t_dimless * cfg.nd.t_unit, spatial_average(s.m_curr), e.F_joules(),
          e.J_joules(), iters};
}

void write_state_snapshot(const SimulationConfig& cfg, const VectorField& m, double t_dimless,
                          long step_label, const std::string& outdir) {
  if (outdir.empty()) return;
  Snapshot s;
  s.nx = cfg.grid.nx;
  s.ny = cfg.grid.ny;
  s.nz = cfg.grid.nz;
  s.dx = cfg.cell.x;
  s.dy = cfg.cell.y;
  s.dz = cfg.cell.z;
  s.time = t_dimless * cfg.nd.t_unit;
  s.m.resize(m.cells());
  for (std::size_t c = 0; c < m.cells(); ++c) s.m[c] = m.at(c);
  write_snapshot(s, outdir + "/snapshot_" + std::to_string(step_label) + ".txt");
}

void audit_step(const SolverState& s, const StepReport& rep, double gmres_tol) {
  double udev = max_unit_deviation(s.m_curr);
  if (udev > kUnitNormTol)
    throw SolverError("audit: unit-norm deviation " + std::to_string(udev) + " at step " +
                      std::to_string(s.step));
  if (rep.dot_identity_dev > 100.0 * gmres_tol)
    throw SolverError("audit: dot-product identity deviation " +
                      std::to_string(rep.dot_identity_dev) + " at step " +
                      std::to_string(s.step));
}

LocalFieldProvider make_provider(const SimulationConfig& cfg, const AppliedFieldSpec& spec,
                                 const DemagKernel* kernel) {
  return [&cfg, &spec, kernel](const VectorField& m, double t) {
    Vec3 he = applied_at(cfg, spec, t);
    if (kernel) {
      VectorField hs = stray_field(*kernel, m);
      return local_field(m, he, &hs, cfg.nd.q, cfg.easy_axis);
    }
    return local_field(m, he, nullptr, cfg.nd.q, cfg.easy_axis);
  };
}

/// Shared relax/pulse loop: record initial state, step to n_steps (or to
/// steady state when requested), record every cadence steps plus the final
/// step, snapshot initial/cadence/final states.
RunResult integrate_dynamic(const SimulationConfig& cfg, const AppliedFieldSpec& spec,
                            const VectorField& m0, bool steady_stop, const std::string& outdir,
                            bool audit) {
  std::optional<DemagKernel> kernel;
  if (cfg.stray_field_enabled) kernel = build_demag_kernel(cfg.grid, cfg.cell);
  const DemagKernel* kp = kernel ? &*kernel : nullptr;

  RunResult out;
  out.state = initialize(m0, cfg.dt);
  SolverState& s = out.state;
  StepperConfig scfg{cfg.nd.epsilon, cfg.material.alpha, cfg.nd.eta, cfg.dt, cfg.solver, {}};
  LocalFieldProvider provider = make_provider(cfg, spec, kp);

  out.records.push_back(make_record(cfg, s, energies_at(cfg, spec, s, 0.0, kp), 0, 0.0, 0));
  write_state_snapshot(cfg, s.m_curr, 0.0, 0, outdir);

  double F_prev = std::numeric_limits<double>::quiet_NaN();
  long last_recorded = 0;
  long last_snapshot = 0;
  while (s.step < cfg.n_steps) {
    StepReport rep = step(s, provider, scfg);
    if (audit) audit_step(s, rep, cfg.solver.tol);
    const long n = s.step;
    const bool record_due = n % cfg.output.cadence == 0 || n == cfg.n_steps;
    const bool steady_due = steady_stop && n % cfg.steady.check_every == 0;
    if (record_due || steady_due) {
      EnergyReport e = energies_at(cfg, spec, s, s.time(), kp);
      if (record_due) {
        out.records.push_back(make_record(cfg, s, e, n, s.time(), rep.krylov.iterations));
        last_recorded = n;
      }
      if (steady_due) {
        double F = e.F_joules();
        if (std::abs(F - F_prev) <= cfg.steady.rel_tol * std::abs(F)) {
          out.reached_steady = true;
          if (!record_due) {
            out.records.push_back(make_record(cfg, s, e, n, s.time(), rep.krylov.iterations));
            last_recorded = n;
          }
        }
        F_prev = F;
      }
    }
    if (cfg.output.snapshot_cadence > 0 && n % cfg.output.snapshot_cadence == 0) {
      write_state_snapshot(cfg, s.m_curr, s.time(), n, outdir);
      last_snapshot = n;
    }
    if (out.reached_steady) break;
  }
  if (s.step != last_recorded) {
    EnergyReport e = energies_at(cfg, spec, s, s.time(), kp);
    out.records.push_back(make_record(cfg, s, e, s.step, s.time(), 0));
  }
  if (s.step != last_snapshot) write_state_snapshot(cfg, s.m_curr, s.time(), s.step, outdir);
  out.final_step = s.step;
  return out;
}

int axis_argmax(const Vec3& v) {
  if (v.x >= v.y && v.x >= v.z) return 0;
  return v.y >= v.z ? 1 : 2;
}

int axis_argmin(const Vec3& v) {
  if (v.x <= v.y && v.x <= v.z) return 0;
  return v.y <= v.z ? 1 : 2;
}

Vec3 axis_unit(int i) { return {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0}; }

}  // namespace

RunResult run_relaxation(const SimulationConfig& cfg, const std::string& outdir, bool audit) {
  RunResult r = integrate_dynamic(cfg, cfg.applied, initial_magnetization(cfg),
                                  cfg.steady.stop_when_steady, outdir, audit);
  if (!outdir.empty()) write_timeseries_csv(r.records, outdir + "/timeseries.csv");
  return r;
}

RunResult run_pulse(const SimulationConfig& cfg, const std::string& outdir, bool audit) {
  RunResult r = integrate_dynamic(cfg, cfg.applied, initial_magnetization(cfg),
                                  /*steady_stop=*/false, outdir, audit);
  if (!outdir.empty()) write_timeseries_csv(r.records, outdir + "/timeseries.csv");
  return r;
}

HysteresisResult run_hysteresis(const SimulationConfig& cfg, const std::string& outdir,
                                bool audit) {
  const HysteresisConfig& hc = cfg.hysteresis;
  const int i_long = axis_argmax(cfg.box);
  const int i_out = axis_argmin(cfg.box);
  const int i_short = 3 - i_long - i_out;
  const Vec3 e_loop = axis_unit(hc.axis == LoopAxis::Long ? i_long : i_short);
  const Vec3 e_out = axis_unit(i_out);
  const double th = hc.canting_deg * std::acos(-1.0) / 180.0;
  const Vec3 perp = cross(e_out, e_loop);
  const Vec3 dir{std::cos(th) * e_loop.x + std::sin(th) * perp.x,
                 std::cos(th) * e_loop.y + std::sin(th) * perp.y,
                 std::cos(th) * e_loop.z + std::sin(th) * perp.z};

  // Uniform field values: descending from field_max, then back up, the
  // turning point visited once.
  std::vector<double> fields;
  const int n = hc.n_field_steps;
  for (int i = 0; i < n; ++i)
    fields.push_back(hc.field_max + (hc.field_min - hc.field_max) * i / (n - 1));
  for (int i = 1; i < n; ++i)
    fields.push_back(hc.field_min + (hc.field_max - hc.field_min) * i / (n - 1));

  DemagKernel kernel;
  if (cfg.stray_field_enabled) kernel = build_demag_kernel(cfg.grid, cfg.cell);
  const DemagKernel* kp = cfg.stray_field_enabled ? &kernel : nullptr;
  StepperConfig scfg{cfg.nd.epsilon, cfg.material.alpha, cfg.nd.eta, cfg.dt, cfg.solver, {}};
  const double field_scale = 1.0 / (cfg.material.mu0 * cfg.material.Ms);

  HysteresisResult out;
  out.loop_dir = dir;
  out.branch_start = static_cast<std::size_t>(n);
  VectorField m(cfg.grid);
  m.fill(dir);

  for (double B : fields) {
    AppliedFieldSpec spec;
    spec.constant = {dir.x * B * field_scale, dir.y * B * field_scale, dir.z * B * field_scale};
    LocalFieldProvider provider = make_provider(cfg, spec, kp);
    SolverState s = initialize(m, cfg.dt);
    double F_prev = std::numeric_limits<double>::quiet_NaN();
    bool steady = false;
    while (!steady && s.step < hc.max_steps_per_field) {
      StepReport rep = step(s, provider, scfg);
      if (audit) audit_step(s, rep, cfg.solver.tol);
      if (s.step % cfg.steady.check_every == 0) {
        double F = energies_at(cfg, spec, s, s.time(), kp).F();
        steady = std::abs(F - F_prev) <= hc.steady_rel_tol * std::abs(F);
        F_prev = F;
      }
    }
    if (!steady)
      std::fprintf(stderr, "hysteresis: field %.6g T not steady after %ld steps\n", B, s.step);
    m = s.m_curr;
    out.points.push_back({B, spatial_average(m), s.step, steady});
  }

  // Coercive field: interpolated zero crossings of the loop-axis component,
  // per branch.
  std::vector<double> crossings;
  auto scan = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo + 1; i < hi; ++i) {
      double p0 = dot(out.points[i - 1].m_avg, e_loop);
      double p1 = dot(out.points[i].m_avg, e_loop);
      if (p0 == 0.0 || p0 * p1 >= 0.0) continue;
      double B0 = out.points[i - 1].field_T, B1 = out.points[i].field_T;
      crossings.push_back(std::abs(B0 - p0 * (B1 - B0) / (p1 - p0)));
    }
  };
  scan(0, out.branch_start);
  scan(out.branch_start, out.points.size());
  if (!crossings.empty()) {
    double sum = 0.0;
    for (double c : crossings) sum += c;
    out.coercive_T = sum / static_cast<double>(crossings.size());
  }

  std::size_t i_rem = 0;
  for (std::size_t i = 1; i < out.branch_start; ++i)
    if (std::abs(out.points[i].field_T) < std::abs(out.points[i_rem].field_T)) i_rem = i;
  out.remanence = out.points[i_rem].m_avg;

  Vec3 d{out.points.front().m_avg.x - out.points.back().m_avg.x,
         out.points.front().m_avg.y - out.points.back().m_avg.y,
         out.points.front().m_avg.z - out.points.back().m_avg.z};
  out.loop_closure = norm(d);

  if (!outdir.empty()) write_hysteresis_csv(out.points, outdir + "/hysteresis.csv");
  return out;
}

std::vector<ConvergenceRow> run_verification(const SimulationConfig& cfg,
                                             const std::string& outdir) {
  const VerifyConfig& vc = cfg.verify;
  const KrylovConfig kc = mms_solver_defaults();
  std::vector<ConvergenceRow> rows;

  auto run_sweep = [&rows](const std::string& name, const ManufacturedCase& mc,
                           const std::vector<Grid>& grids, const std::vector<int>& nts, double T,
                           const std::vector<double>& resolutions, const KrylovConfig& kc) {
    std::vector<double> errors;
    for (std::size_t i = 0; i < grids.size(); ++i)
      errors.push_back(run_manufactured(mc, grids[i], nts[i], T, kc).error);
    double order = convergence_order(errors, resolutions);
    for (std::size_t i = 0; i < errors.size(); ++i)
      rows.push_back({name, mc.alpha, mc.eta, resolutions[i], errors[i], order});
  };

  for (const std::string& sweep : vc.sweeps) {
    if (sweep == "1d_time") {
      const double T = 0.5;
      Grid g(1000, 1, 1, 1.0 / 1000, 1.0, 1.0);
      std::vector<Grid> grids(vc.nt.size(), g);
      std::vector<double> res;
      for (int nt : vc.nt) res.push_back(T / nt);
      for (const VerifyCase& vcase : vc.cases_1d)
        run_sweep("1d_time", {1, vcase.alpha, vcase.eta}, grids, vc.nt, T, res, kc);
    } else if (sweep == "1d_space") {
      const double T = 0.5, dt = 5.0e-3;
      const int nt = static_cast<int>(std::lround(T / dt));
      std::vector<Grid> grids;
      std::vector<double> res;
      for (int nx : vc.nx) {
        grids.emplace_back(nx, 1, 1, 1.0 / nx, 1.0, 1.0);
        res.push_back(1.0 / nx);
      }
      std::vector<int> nts(grids.size(), nt);
      for (const VerifyCase& vcase : vc.cases_1d)
        run_sweep("1d_space", {1, vcase.alpha, vcase.eta}, grids, nts, T, res, kc);
    } else if (sweep == "3d_time") {
      // Tiny box: the solution is nearly uniform, so the spatial error is
      // far below the temporal one being measured.
      const double T = 0.5;
      Grid g(10, 10, 10, 1.0e-3, 1.0e-3, 1.0e-3);
      std::vector<Grid> grids(vc.nt.size(), g);
      std::vector<double> res;
      for (int nt : vc.nt) res.push_back(T / nt);
      for (const VerifyCase& vcase : vc.cases_3d)
        run_sweep("3d_time", {3, vcase.alpha, vcase.eta}, grids, vc.nt, T, res, kc);
    } else if (sweep == "3d_space") {
      const double T = 0.1, dt = 1.0e-3;
      const int nt = static_cast<int>(std::lround(T / dt));
      std::vector<Grid> grids;
      std::vector<double> res;
      for (int nc : vc.n3d) {
        grids.emplace_back(nc, nc, nc, 1.0 / nc, 1.0 / nc, 1.0 / nc);
        res.push_back(1.0 / nc);
      }
      std::vector<int> nts(grids.size(), nt);
      for (const VerifyCase& vcase : vc.cases_3d)
        run_sweep("3d_space", {3, vcase.alpha, vcase.eta}, grids, nts, T, res, kc);
    } else {
      throw ConfigError("unknown verify sweep '" + sweep + "'");
    }
  }
  if (!outdir.empty()) write_convergence_csv(rows, outdir + "/convergence.csv");
  return rows;
}

void write_timeseries_csv(const std::vector<TimeSeriesRecord>& rows, const std::string& path) {
  CsvFile csv(path);
  std::fprintf(csv.f, "step,t,mx,my,mz,F,J,gmres_iters\n");
  for (const TimeSeriesRecord& r : rows)
    std::fprintf(csv.f, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.step, r.t, r.m_avg.x,
                 r.m_avg.y, r.m_avg.z, r.F, r.J, r.gmres_iters);
}

void write_hysteresis_csv(const std::vector<HysteresisPoint>& rows, const std::string& path) {
  CsvFile csv(path);
  std::fprintf(csv.f, "field_T,mx,my,mz,steps_to_steady\n");
  for (const HysteresisPoint& r : rows)
    std::fprintf(csv.f, "%.17g,%.17g,%.17g,%.17g,%ld\n", r.field_T, r.m_avg.x, r.m_avg.y,
                 r.m_avg.z, r.steps);
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
  CsvFile csv(path);
  std::fprintf(csv.f, "sweep,alpha,eta,resolution,error,order\n");
  for (const ConvergenceRow& r : rows)
    std::fprintf(csv.f, "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.sweep.c_str(), r.alpha, r.eta,
                 r.resolution, r.error, r.order);
}

VectorField initial_magnetization(const SimulationConfig& cfg) {
  VectorField m(cfg.grid);
  switch (cfg.initial.kind) {
    case InitialState::Kind::Uniform: {
      m.fill(cfg.initial.direction);
      break;
    }
    case InitialState::Kind::Random: {
      std::mt19937_64 rng(cfg.seed);
      std::normal_distribution<double> n01(0.0, 1.0);
      for (std::size_t c = 0; c < m.cells(); ++c) {
        Vec3 v;
        double vn = 0.0;
        do {
          v = {n01(rng), n01(rng), n01(rng)};
          vn = norm(v);
        } while (vn < 1.0e-6);
        m.set(c, {v.x / vn, v.y / vn, v.z / vn});
      }
      break;
    }
    case InitialState::Kind::File: {
      Snapshot s = read_snapshot(cfg.initial.path);
      if (s.nx != cfg.grid.nx || s.ny != cfg.grid.ny || s.nz != cfg.grid.nz)
        throw ConfigError("initial_m file " + cfg.initial.path + ": grid " +
                          std::to_string(s.nx) + "x" + std::to_string(s.ny) + "x" +
                          std::to_string(s.nz) + " does not match the configured mesh");
      auto close = [](double a, double b) { return std::abs(a - b) <= 1.0e-9 * std::abs(b); };
      if (!close(s.dx, cfg.cell.x) || !close(s.dy, cfg.cell.y) || !close(s.dz, cfg.cell.z))
        throw ConfigError("initial_m file " + cfg.initial.path +
                          ": cell size does not match the configured mesh");
      for (std::size_t c = 0; c < m.cells(); ++c) {
        double vn = norm(s.m[c]);
        if (vn < 1.0e-8)
          throw ConfigError("initial_m file " + cfg.initial.path + ": zero vector at cell " +
                            std::to_string(c));
        m.set(c, {s.m[c].x / vn, s.m[c].y / vn, s.m[c].z / vn});
      }
      break;
    }
  }
  return m;
}

}  // namespace illg
