#include "illg/stepper.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace illg {

namespace {

/// out = cdiag * v + eps_dt * (m x lap) + cross_coef * (m x v), one cell.
inline void combine_cell(const double* m, const double* v, const double* lap, double* out,
                         double cdiag, double eps_dt, double cross_coef) {
  const Vec3 mm{m[0], m[1], m[2]};
  const Vec3 vv{v[0], v[1], v[2]};
  const Vec3 ll{lap[0], lap[1], lap[2]};
  Vec3 r = cdiag * vv + eps_dt * cross(mm, ll);
  if (cross_coef != 0.0) r += cross_coef * cross(mm, vv);
  out[0] = r.x;
  out[1] = r.y;
  out[2] = r.z;
}

void apply_operator_raw(const Grid& g, const double* m_n, const double* v, double* lap_scratch,
                        double* out, double cdiag, double eps_dt, double cross_coef) {
  apply_laplacian_raw(g, v, lap_scratch);
  const std::size_t n = g.cell_count();
  for (std::size_t c = 0; c < n; ++c)
    combine_cell(m_n + 3 * c, v + 3 * c, lap_scratch + 3 * c, out + 3 * c, cdiag, eps_dt,
                 cross_coef);
}

struct SolveOutcome {
  std::vector<double> tilde;
  SolveReport report;
};

SolveOutcome solve_linear(const SolverState& s, std::vector<double>&& rhs,
                          const StepperConfig& cfg, double cdiag, double cross_coef) {
  const Grid& g = s.m_curr.grid;
  VectorField lap_scratch(g);
  const double* m_n = s.m_curr.values.data();
  const double eps_dt = cfg.epsilon * cfg.dt;
  LinearOperator op = [&](const std::vector<double>& v, std::vector<double>& out) {
    apply_operator_raw(g, m_n, v.data(), lap_scratch.values.data(), out.data(), cdiag, eps_dt,
                       cross_coef);
    if (cfg.precondition) cfg.precondition(out);
  };
  if (cfg.precondition) cfg.precondition(rhs);
  SolveOutcome o;
  o.tilde = s.m_curr.values;  // x0 = m_curr
  o.report = gmres_solve(op, rhs, o.tilde, cfg.krylov);
  if (!o.report.converged)
    throw SolverError("linear solve did not converge at step " + std::to_string(s.step) +
                      " (residual " + std::to_string(o.report.final_residual) + " after " +
                      std::to_string(o.report.iterations) + " iterations)");
  return o;
}

/// Projects tilde onto the unit sphere into state (m_prev <- m_curr <- tilde)
/// and fills the projection diagnostics.
void project_and_advance(SolverState& s, const std::vector<double>& tilde, StepReport& rep) {
  const std::size_t n = s.m_curr.cells();
  double min_norm = std::numeric_limits<double>::infinity();
  std::swap(s.m_prev, s.m_curr);
  for (std::size_t c = 0; c < n; ++c) {
    const Vec3 v{tilde[3 * c], tilde[3 * c + 1], tilde[3 * c + 2]};
    const double nn = norm(v);
    if (nn < min_norm) min_norm = nn;
    if (nn < 1.0e-8)
      throw SolverError("projection collapse at step " + std::to_string(s.step) + ", cell " +
                        std::to_string(c));
    s.m_curr.set(c, v / nn);
  }
  rep.min_tilde_norm = min_norm;
  ++s.step;
}

}  // namespace

SolverState initialize(const VectorField& m0, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("initialize: dt must be positive");
  if (m0.cells() == 0) throw std::invalid_argument("initialize: empty field");
  if (max_unit_deviation(m0) > 1.0e-10)
    throw std::invalid_argument("initialize: m0 is not a unit field");
  SolverState s;
  s.m_prev = m0;
  s.m_curr = m0;
  s.step = 1;
  s.dt = dt;
  return s;
}

VectorField apply_system_operator(const VectorField& m_n, const VectorField& v,
                                  const StepperConfig& cfg) {
  if (!(v.grid == m_n.grid)) throw std::invalid_argument("apply_system_operator: grid mismatch");
  VectorField out(m_n.grid), lap(m_n.grid);
  const double damp = cfg.alpha * (1.0 + 2.0 * cfg.eta / cfg.dt);
  apply_operator_raw(m_n.grid, m_n.values.data(), v.values.data(), lap.values.data(),
                     out.values.data(), 1.0, cfg.epsilon * cfg.dt, -damp);
  return out;
}

VectorField assemble_rhs(const SolverState& s, const VectorField& f_local,
                         const StepperConfig& cfg) {
  if (!(f_local.grid == s.m_curr.grid)) throw std::invalid_argument("assemble_rhs: grid mismatch");
  const Grid& g = s.m_curr.grid;
  VectorField lap = apply_laplacian(g, s.m_prev);
  VectorField b(g);
  const double eps_dt = cfg.epsilon * cfg.dt;
  const double damp_prev = cfg.alpha * (1.0 - 2.0 * cfg.eta / cfg.dt);
  for (std::size_t c = 0; c < b.cells(); ++c) {
    const Vec3 mn = s.m_curr.at(c);
    const Vec3 mp = s.m_prev.at(c);
    const Vec3 rhs = mp - eps_dt * cross(mn, lap.at(c)) - damp_prev * cross(mn, mp) -
                     (2.0 * cfg.dt) * cross(mn, f_local.at(c));
    b.set(c, rhs);
  }
  return b;
}

StepReport step(SolverState& s, const LocalFieldProvider& field, const StepperConfig& cfg) {
  const VectorField f_local = field(s.m_curr, s.time());
  VectorField b = assemble_rhs(s, f_local, cfg);

  const double damp = cfg.alpha * (1.0 + 2.0 * cfg.eta / cfg.dt);
  StepReport rep;
  SolveOutcome o = solve_linear(s, std::move(b.values), cfg, 1.0, -damp);
  rep.krylov = o.report;

  double dev = 0.0;
  for (std::size_t c = 0; c < s.m_curr.cells(); ++c) {
    const Vec3 t{o.tilde[3 * c], o.tilde[3 * c + 1], o.tilde[3 * c + 2]};
    dev = std::max(dev, std::abs(dot(t, s.m_curr.at(c)) - dot(s.m_curr.at(c), s.m_prev.at(c))));
  }
  rep.dot_identity_dev = dev;

  project_and_advance(s, o.tilde, rep);
  return rep;
}

StepReport step_verification(SolverState& s, const SourceProvider& source,
                             const StepperConfig& cfg) {
  const VectorField g_n = source(s.time());
  if (!(g_n.grid == s.m_curr.grid))
    throw std::invalid_argument("step_verification: source grid mismatch");

  VectorField b = assemble_rhs(s, VectorField(s.m_curr.grid), cfg);
  for (std::size_t i = 0; i < b.values.size(); ++i)
    b.values[i] += 2.0 * cfg.dt * g_n.values[i];

  const double damp = cfg.alpha * (1.0 + 2.0 * cfg.eta / cfg.dt);
  StepReport rep;
  SolveOutcome o = solve_linear(s, std::move(b.values), cfg, 1.0, -damp);
  rep.krylov = o.report;
  project_and_advance(s, o.tilde, rep);
  return rep;
}

}  // namespace illg
