#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "illg/grid.hpp"
#include "illg/stepper.hpp"
#include "test_support.hpp"

using namespace illg;

namespace {

VectorField uniform_field(const Grid& g, const Vec3& v) {
  VectorField f(g);
  f.fill(v);
  return f;
}

StepperConfig plain_config(double alpha, double eta, double dt) {
  StepperConfig cfg;
  cfg.epsilon = 0.0;
  cfg.alpha = alpha;
  cfg.eta = eta;
  cfg.dt = dt;
  cfg.krylov = {1e-13, 30, 500};
  return cfg;
}

/// Error of the undamped single spin in a constant field h0 e3 against the
/// exact orbit (cos h0 t, sin h0 t, 0). The rest start (equal levels) lags
/// the smooth mode by dt/2 and seeds an O(dt) two-level oscillation; the
/// consecutive-level average cancels the oscillation and adds another dt/2
/// of lag, so the average is the exact trajectory at t - dt, to O(dt^2).
double precession_error(int n_steps, double T, double h0) {
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  SolverState s = initialize(uniform_field(g, {1.0, 0.0, 0.0}), T / n_steps);
  StepperConfig cfg = plain_config(0.0, 0.0, s.dt);
  LocalFieldProvider field = [&](const VectorField&, double) {
    return uniform_field(g, {0.0, 0.0, h0});
  };
  while (s.step < n_steps) (void)step(s, field, cfg);
  Vec3 mid = 0.5 * (s.m_curr.at(0) + s.m_prev.at(0));
  mid = mid / norm(mid);
  double tm = T - s.dt;
  Vec3 exact{std::cos(h0 * tm), std::sin(h0 * tm), 0.0};
  return norm(mid - exact);
}

/// Reference integration of the equivalent damped form
///   (1 + a^2) dm/dt = -m x h - a m x (m x h).
Vec3 rk4_reference(Vec3 m, const Vec3& h, double a, double T, int n) {
  auto rhs = [&](const Vec3& v) {
    Vec3 vxh = cross(v, h);
    return (-1.0 / (1.0 + a * a)) * (vxh + a * cross(v, vxh));
  };
  double dt = T / n;
  for (int i = 0; i < n; ++i) {
    Vec3 k1 = rhs(m);
    Vec3 k2 = rhs(m + 0.5 * dt * k1);
    Vec3 k3 = rhs(m + 0.5 * dt * k2);
    Vec3 k4 = rhs(m + dt * k3);
    m = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    m = m / norm(m);
  }
  return m;
}

}  // namespace

TEST_CASE("initialize validates its inputs") {
  Grid g(2, 1, 1, 0.5, 1.0, 1.0);
  VectorField unit = uniform_field(g, {0.0, 0.0, 1.0});
  CHECK_THROWS_AS((void)initialize(uniform_field(g, {0.0, 0.0, 1.5}), 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)initialize(unit, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)initialize(unit, -0.1), std::invalid_argument);

  SolverState s = initialize(unit, 0.25);
  CHECK(s.step == 1);
  CHECK(s.dt == 0.25);
  CHECK(s.time() == 0.25);
  CHECK(s.m_prev.at(0).z == 1.0);
  CHECK(s.m_curr.at(1).z == 1.0);
}

TEST_CASE("system operator reproduces a hand computation") {
  // epsilon = 0, alpha = 1, eta = 0, dt = 1: A v = v - m x v.
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  StepperConfig cfg = plain_config(1.0, 0.0, 1.0);
  VectorField m = uniform_field(g, {1.0, 0.0, 0.0});
  VectorField v = uniform_field(g, {0.0, 1.0, 0.0});
  VectorField av = apply_system_operator(m, v, cfg);
  CHECK(av.at(0).x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(av.at(0).y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(av.at(0).z == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("system operator includes the exchange coupling") {
  // Two cells, v = (0, 1, 0) on the left and 0 on the right: lap v is
  // (-1, 1)/h^2 in the y slot; with m = e1 the cross lands in z.
  Grid g(2, 1, 1, 0.5, 1.0, 1.0);
  StepperConfig cfg;
  cfg.epsilon = 0.25;
  cfg.alpha = 0.0;
  cfg.eta = 0.0;
  cfg.dt = 2.0;
  VectorField m = uniform_field(g, {1.0, 0.0, 0.0});
  VectorField v(g);
  v.set(0, {0.0, 1.0, 0.0});
  VectorField av = apply_system_operator(m, v, cfg);
  // lap v at cell 0: (v1 - v0)/h^2 = -4 e2; cross e1 x (-4 e2) = -4 e3,
  // scaled by epsilon*dt = 0.5.
  CHECK(av.at(0).y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(av.at(0).z == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(av.at(1).z == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("undamped single spin precesses at the exact rate") {
  // Phase error of the midpoint stencil: Omega*T*(Omega*dt)^2/6 ~ 5e-5 here.
  double h0 = 2.0, T = 1.5;
  double err = precession_error(300, T, h0);
  CHECK(err < 1e-4);
  // Second order in dt: quartering the error when halving the step.
  double coarse = precession_error(150, T, h0);
  CHECK(coarse / err == doctest::Approx(4.0).epsilon(0.1));
  // The projection keeps the spin exactly unit length.
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  SolverState s = initialize(uniform_field(g, {1.0, 0.0, 0.0}), 0.01);
  StepperConfig cfg = plain_config(0.0, 0.0, s.dt);
  LocalFieldProvider field = [&](const VectorField&, double) {
    return uniform_field(g, {0.0, 0.0, h0});
  };
  for (int i = 0; i < 50; ++i) (void)step(s, field, cfg);
  CHECK(max_unit_deviation(s.m_curr) < 1e-15);
}

TEST_CASE("damping relaxes the spin toward the field") {
  // Compare the level-averaged trajectory against a Runge-Kutta reference of
  // the equivalent damped form. The raw levels carry the O(dt) rest-start
  // oscillation; the average suppresses it to O(dt^2).
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  double c = 1.0 / std::sqrt(2.0);
  Vec3 h{0.0, 0.0, 1.0};
  double a = 0.1, T = 4.0;

  double errs[2];
  int idx = 0;
  for (int n : {200, 400}) {
    VectorField m0(g);
    m0.fill({c, 0.0, c});
    SolverState s = initialize(m0, T / n);
    StepperConfig cfg = plain_config(a, 0.0, s.dt);
    LocalFieldProvider field = [&](const VectorField&, double) { return uniform_field(g, h); };
    double mid_z_prev = c;
    bool monotone = true;
    while (s.step < n) {
      (void)step(s, field, cfg);
      // The smooth trajectory climbs toward the field; allow the O(dt^2)
      // remnant of the two-level oscillation.
      double mid_z = 0.5 * (s.m_curr.at(0).z + s.m_prev.at(0).z);
      if (mid_z < mid_z_prev - 1e-3) monotone = false;
      mid_z_prev = mid_z;
    }
    CHECK(monotone);
    Vec3 mid = 0.5 * (s.m_curr.at(0) + s.m_prev.at(0));
    mid = mid / norm(mid);
    Vec3 ref = rk4_reference({c, 0.0, c}, h, a, T - s.dt, 20000);
    errs[idx++] = norm(mid - ref);
  }
  CHECK(errs[0] < 5e-3);
  CHECK(errs[0] / errs[1] > 3.0);  // second order, with slack for the remnant
  CHECK(errs[0] / errs[1] < 5.0);
}

TEST_CASE("the pre-projection iterate conserves the level dot product") {
  // m_tilde . m_n = m_n . m_prev cellwise, up to solver tolerance, for the
  // full equation on a rough random state with exchange and inertia active.
  Grid g(5, 4, 3, 0.2, 0.25, 1.0 / 3.0);
  VectorField m0 = testutil::random_unit_field(g, 21);
  SolverState s = initialize(m0, 0.02);
  StepperConfig cfg;
  cfg.epsilon = 0.05;
  cfg.alpha = 0.1;
  cfg.eta = 0.3;
  cfg.dt = s.dt;
  cfg.krylov = {1e-13, 60, 2000};
  LocalFieldProvider field = [&](const VectorField& m, double) {
    VectorField f(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      Vec3 mi = m.at(i);
      f.set(i, {0.3, -0.1 * mi.y, 0.2 * mi.z});
    }
    return f;
  };
  for (int i = 0; i < 5; ++i) {
    StepReport rep = step(s, field, cfg);
    CHECK(rep.krylov.converged);
    CHECK(rep.dot_identity_dev < 1e-11);
    CHECK(rep.min_tilde_norm > 0.9);
    CHECK(max_unit_deviation(s.m_curr) < 1e-15);
  }
  CHECK(s.step == 6);
}

TEST_CASE("the verification stencil leaves a stationary state alone") {
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  SolverState s = initialize(uniform_field(g, {0.0, 1.0, 0.0}), 0.1);
  StepperConfig cfg = plain_config(0.0, 0.0, s.dt);
  cfg.epsilon = 1.0;
  SourceProvider zero = [&](double) { return VectorField(g); };
  for (int i = 0; i < 3; ++i) (void)step_verification(s, zero, cfg);
  CHECK(s.m_curr.at(0).y == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.step == 4);
}

TEST_CASE("a hopeless iteration budget raises a solver error") {
  Grid g(6, 6, 1, 1.0 / 6, 1.0 / 6, 1.0);
  VectorField m0 = testutil::random_unit_field(g, 8);
  SolverState s = initialize(m0, 0.1);
  StepperConfig cfg;
  cfg.epsilon = 0.5;
  cfg.alpha = 1.0;
  cfg.eta = 10.0;  // lambda ~ 201: far from the identity
  cfg.dt = s.dt;
  cfg.krylov = {1e-15, 2, 2};
  LocalFieldProvider field = [&](const VectorField&, double) {
    return uniform_field(g, {0.0, 0.0, 1.0});
  };
  CHECK_THROWS_AS((void)step(s, field, cfg), SolverError);
}

TEST_CASE("rhs assembly matches the explicit formula on one cell") {
  // b = m_prev - alpha*(1 - 2*eta/dt)*(m_n x m_prev) - 2*dt*(m_n x f).
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  SolverState s = initialize(uniform_field(g, {1.0, 0.0, 0.0}), 0.5);
  s.m_prev.set(0, {0.0, 1.0, 0.0});  // distinct levels
  StepperConfig cfg = plain_config(0.2, 0.25, 0.5);
  VectorField f = uniform_field(g, {0.0, 0.0, 3.0});
  VectorField b = assemble_rhs(s, f, cfg);
  // alpha*(1 - 2*eta/dt) = 0.2*(1 - 1) = 0; m_n x f = e1 x 3 e3 = -3 e2.
  CHECK(b.at(0).x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.at(0).y == doctest::Approx(1.0 + 3.0).epsilon(1e-14));
  CHECK(b.at(0).z == doctest::Approx(0.0).epsilon(1e-15));
}
