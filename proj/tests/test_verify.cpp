#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "illg/grid.hpp"
#include "illg/stepper.hpp"
#include "illg/verify.hpp"
#include "test_support.hpp"

using namespace illg;

namespace {

Vec3 exact_at(const ManufacturedCase& mc, const Vec3& p, double t) {
  return mc.dim == 1 ? exact_solution_1d(p.x, t) : exact_solution_3d(p.x, p.y, p.z, t);
}

/// Fourth-order central first derivative in the scalar argument of f.
template <typename F>
Vec3 d1(F&& f, double s, double h) {
  return (1.0 / (12.0 * h)) *
         (f(s - 2 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2 * h));
}

/// Fourth-order central second derivative.
template <typename F>
Vec3 d2(F&& f, double s, double h) {
  return (1.0 / (12.0 * h * h)) * (-1.0 * f(s - 2 * h) + 16.0 * f(s - h) - 30.0 * f(s) +
                                   16.0 * f(s + h) - 1.0 * f(s + 2 * h));
}

/// Independent reconstruction of the source from derivatives of the exact
/// solution alone:
///   g = dm/dt + m x lap m - alpha*(m x (dm/dt + eta*d2m/dt2)).
Vec3 source_by_differences(const ManufacturedCase& mc, const Vec3& p, double t) {
  const double h = 1e-3;
  auto in_t = [&](double s) { return exact_at(mc, p, s); };
  Vec3 dm = d1(in_t, t, h);
  Vec3 d2m = d2(in_t, t, h);
  auto in_x = [&](double s) { return exact_at(mc, {s, p.y, p.z}, t); };
  Vec3 lap = d2(in_x, p.x, h);
  if (mc.dim == 3) {
    auto in_y = [&](double s) { return exact_at(mc, {p.x, s, p.z}, t); };
    auto in_z = [&](double s) { return exact_at(mc, {p.x, p.y, s}, t); };
    lap += d2(in_y, p.y, h);
    lap += d2(in_z, p.z, h);
  }
  Vec3 m = exact_at(mc, p, t);
  return dm + cross(m, lap) - mc.alpha * cross(m, dm + mc.eta * d2m);
}

}  // namespace

TEST_CASE("exact solutions are unit vectors with flat ends") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double x = u(rng), y = u(rng), z = u(rng), t = 2.0 * u(rng);
    CHECK(std::abs(norm(exact_solution_1d(x, t)) - 1.0) < 1e-14);
    CHECK(std::abs(norm(exact_solution_3d(x, y, z, t)) - 1.0) < 1e-14);
  }
  // Normal derivative vanishes on every boundary face.
  double h = 1e-4, t = 0.7;
  auto at_x = [&](double s) { return exact_solution_1d(s, t); };
  CHECK(norm(d1(at_x, 0.0, h)) < 1e-6);
  CHECK(norm(d1(at_x, 1.0, h)) < 1e-6);
  for (double edge : {0.0, 1.0}) {
    auto fx = [&](double s) { return exact_solution_3d(s, 0.4, 0.6, t); };
    auto fy = [&](double s) { return exact_solution_3d(0.3, s, 0.6, t); };
    auto fz = [&](double s) { return exact_solution_3d(0.3, 0.4, s, t); };
    CHECK(norm(d1(fx, edge, h)) < 1e-6);
    CHECK(norm(d1(fy, edge, h)) < 1e-6);
    CHECK(norm(d1(fz, edge, h)) < 1e-6);
  }
}

TEST_CASE("the solutions swing between the equator and the pole") {
  // At t = 0 the solution is e3 everywhere; at t = pi/2 it lies in-plane.
  Vec3 m0 = exact_solution_1d(0.37, 0.0);
  CHECK(m0.x == 0.0);
  CHECK(m0.y == 0.0);
  CHECK(m0.z == 1.0);
  Vec3 mq = exact_solution_3d(0.2, 0.8, 0.5, 3.14159265358979323846 / 2.0);
  CHECK(std::abs(mq.z) < 1e-12);
}

TEST_CASE("closed-form source matches a finite-difference reconstruction") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_real_distribution<double> ut(0.1, 1.4);
  for (ManufacturedCase mc : {ManufacturedCase{1, 0.0, 0.0}, ManufacturedCase{1, 0.01, 100.0},
                              ManufacturedCase{1, 0.4, 2.5}, ManufacturedCase{3, 0.01, 1000.0},
                              ManufacturedCase{3, 0.2, 0.0}}) {
    for (int i = 0; i < 12; ++i) {
      Vec3 p{u(rng), u(rng), u(rng)};
      double t = ut(rng);
      Vec3 g_closed = source_term(mc, p, t);
      Vec3 g_fd = source_by_differences(mc, p, t);
      double scale = std::max(1.0, norm(g_closed));
      CAPTURE(mc.dim);
      CAPTURE(mc.alpha);
      CAPTURE(mc.eta);
      CHECK(norm(g_closed - g_fd) < 1e-6 * scale);
    }
  }
}

TEST_CASE("second time derivative of the exact solution is minus itself") {
  // m_e = (cos P sin t, sin P sin t, cos t) solves d2m/dt2 = -m, which the
  // source uses to fold the inertial term.
  ManufacturedCase mc{3, 0.0, 0.0};
  Vec3 p{0.3, 0.7, 0.45};
  double t = 0.9, h = 1e-3;
  auto in_t = [&](double s) { return exact_at(mc, p, s); };
  Vec3 lhs = d2(in_t, t, h);
  Vec3 rhs = -1.0 * exact_at(mc, p, t);
  CHECK(norm(lhs - rhs) < 1e-9);
}

TEST_CASE("samplers evaluate at cell centers") {
  ManufacturedCase mc{1, 0.0, 0.0};
  Grid g(4, 1, 1, 0.25, 1.0, 1.0);
  double t = 0.6;
  VectorField f = sample_exact(mc, g, t);
  for (int i = 0; i < 4; ++i) {
    Vec3 want = exact_solution_1d((i + 0.5) * 0.25, t);
    CHECK(norm(f.at(i) - want) == 0.0);
  }
  ManufacturedCase mc3{3, 0.1, 5.0};
  Grid g3(2, 3, 2, 0.5, 1.0 / 3.0, 0.5);
  VectorField s = sample_source(mc3, g3, t);
  Vec3 want = source_term(mc3, {0.75, 0.5, 0.25}, t);
  CHECK(norm(s.at(g3.index(1, 1, 0)) - want) == 0.0);
}

TEST_CASE("linf error scans all cells and components") {
  Grid g(3, 1, 1, 1.0 / 3.0, 1.0, 1.0);
  VectorField a(g), b(g);
  a.set(1, {0.001, -0.002, 0.0});
  b.set(2, {0.0, 0.0, -0.003});
  CHECK(linf_error(a, b) == doctest::Approx(0.003).epsilon(1e-15));
  Grid g2(2, 1, 1, 0.5, 1.0, 1.0);
  VectorField c(g2);
  CHECK_THROWS_AS((void)linf_error(a, c), std::invalid_argument);
}

TEST_CASE("convergence order fits the reference tables") {
  // Least-squares slopes of the frozen reference error rows.
  std::vector<double> nt_steps{0.5 / 20, 0.5 / 40, 0.5 / 80, 0.5 / 160};
  std::vector<double> temporal{4.56e-05, 1.15e-05, 2.96e-06, 8.23e-07};
  CHECK(convergence_order(temporal, nt_steps) == doctest::Approx(1.9334).epsilon(1e-3));

  std::vector<double> hx{1.0 / 20, 1.0 / 40, 1.0 / 80, 1.0 / 160};
  std::vector<double> spatial{2.74e-4, 6.98e-05, 1.88e-05, 6.07e-06};
  CHECK(convergence_order(spatial, hx) == doctest::Approx(1.8382).epsilon(1e-3));

  // An exact quadratic decay fits slope 2 to machine precision.
  std::vector<double> q{16.0, 4.0, 1.0};
  std::vector<double> s{0.4, 0.2, 0.1};
  CHECK(convergence_order(q, s) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("convergence order rejects degenerate input") {
  CHECK_THROWS_AS((void)convergence_order({1.0}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS((void)convergence_order({1.0, 2.0}, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS((void)convergence_order({1.0, 0.0}, {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS((void)convergence_order({1.0, 0.5}, {0.2, -0.1}), std::invalid_argument);
}

TEST_CASE("preconditioner inverts the operator exactly on a uniform field") {
  // With m_n frozen to one uniform axis the update operator and the
  // preconditioner are the same matrix, so P^{-1}(A v) must recover v.
  Grid g(6, 5, 4, 0.1, 0.15, 0.25);
  StepperConfig cfg;
  cfg.epsilon = 0.8;
  cfg.alpha = 0.05;
  cfg.eta = 3.0;
  cfg.dt = 0.2;
  const Vec3 u = (1.0 / 3.0) * Vec3{2.0, -1.0, 2.0};
  VectorField m_n(g);
  m_n.fill(u);

  UniformAxisPreconditioner pc(g, cfg.epsilon, cfg.dt,
                               cfg.alpha * (1.0 + 2.0 * cfg.eta / cfg.dt));
  pc.set_axis(u);

  std::mt19937_64 rng(11);
  VectorField v = testutil::random_unit_field(g, 11);
  VectorField av = apply_system_operator(m_n, v, cfg);
  std::vector<double> w = av.values;
  pc.apply_inverse(w);
  double dev = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) dev = std::max(dev, std::abs(w[i] - v.values[i]));
  CHECK(dev < 1e-12);

  // And the other way round: A applied to P^{-1} v recovers v.
  std::vector<double> pv = v.values;
  pc.apply_inverse(pv);
  VectorField pvf(g);
  pvf.values = pv;
  VectorField back = apply_system_operator(m_n, pvf, cfg);
  dev = 0.0;
  for (std::size_t i = 0; i < back.values.size(); ++i)
    dev = std::max(dev, std::abs(back.values[i] - v.values[i]));
  CHECK(dev < 1e-12);
}

TEST_CASE("preconditioner reduces to the single-block inverse on one cell") {
  // One cell has no Laplacian modes, so P = I - damp*(u x .) and the inverse
  // is (w + damp u x w + damp^2 (u.w) u)/(1 + damp^2).
  Grid g(1, 1, 1, 1.0, 1.0, 1.0);
  const double damp = 1.7;
  UniformAxisPreconditioner pc(g, 2.0, 0.5, damp);
  const Vec3 u{0.0, 0.6, 0.8};
  pc.set_axis(u);
  const Vec3 w{0.3, -1.1, 0.7};
  std::vector<double> v{w.x, w.y, w.z};
  pc.apply_inverse(v);
  const Vec3 want =
      (1.0 / (1.0 + damp * damp)) * (w + damp * cross(u, w) + (damp * damp * dot(u, w)) * u);
  CHECK(std::abs(v[0] - want.x) < 1e-15);
  CHECK(std::abs(v[1] - want.y) < 1e-15);
  CHECK(std::abs(v[2] - want.z) < 1e-15);
}

TEST_CASE("preconditioner validates its inputs") {
  Grid g(4, 1, 1, 0.25, 1.0, 1.0);
  CHECK_THROWS_AS(UniformAxisPreconditioner(g, 1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(UniformAxisPreconditioner(g, 1.0, -0.5, 0.1), std::invalid_argument);
  UniformAxisPreconditioner pc(g, 1.0, 0.1, 0.0);
  CHECK_THROWS_AS(pc.set_axis({0.0, 0.0, 0.0}), std::invalid_argument);
  std::vector<double> wrong(9, 0.0);
  CHECK_THROWS_AS(pc.apply_inverse(wrong), std::invalid_argument);
}

TEST_CASE("preconditioner survives moves") {
  Grid g(8, 1, 1, 0.125, 1.0, 1.0);
  UniformAxisPreconditioner a(g, 1.0, 0.05, 0.3);
  a.set_axis({0.0, 0.0, 1.0});
  std::vector<double> v(3 * 8, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.7 * static_cast<double>(i + 1));
  std::vector<double> w = v;
  a.apply_inverse(w);

  UniformAxisPreconditioner b = std::move(a);
  std::vector<double> w2 = v;
  b.apply_inverse(w2);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w2[i] == w[i]);
}

TEST_CASE("manufactured runs converge at second order in time") {
  ManufacturedCase mc{1, 0.01, 100.0};
  Grid g(200, 1, 1, 1.0 / 200, 1.0, 1.0);
  KrylovConfig cfg = mms_solver_defaults();
  MmsResult coarse = run_manufactured(mc, g, 10, 0.5, cfg);
  MmsResult fine = run_manufactured(mc, g, 20, 0.5, cfg);
  CHECK(coarse.error > 0.0);
  CHECK(fine.error > 0.0);
  CHECK(coarse.max_iterations > 0);
  // Preconditioning keeps the counts far below the 2*nx the bare operator
  // needs on this spectrum.
  CHECK(coarse.max_iterations <= 40);
  CHECK(fine.max_iterations <= 40);
  double ratio = coarse.error / fine.error;
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
}

TEST_CASE("solver defaults are sized for the preconditioned runs") {
  KrylovConfig cfg = mms_solver_defaults();
  CHECK(cfg.tol == 1e-13);
  CHECK(cfg.restart >= 30);
  CHECK(cfg.max_iters >= 300);
}
