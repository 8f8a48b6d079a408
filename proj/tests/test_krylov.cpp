#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "illg/krylov.hpp"
#include "illg/stepper.hpp"
#include "test_support.hpp"

using namespace illg;

namespace {

LinearOperator dense_op(const Eigen::MatrixXd& A) {
  return [&A](const std::vector<double>& in, std::vector<double>& out) {
    Eigen::Map<const Eigen::VectorXd> x(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y = A * x;
  };
}

double residual_norm(const Eigen::MatrixXd& A, const std::vector<double>& rhs,
                     const std::vector<double>& x) {
  Eigen::Map<const Eigen::VectorXd> xe(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<const Eigen::VectorXd> be(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return (be - A * xe).norm();
}

}  // namespace

TEST_CASE("identity-plus-cross system has the hand-solvable solution") {
  // A v = v + e1 x v, so A = [[1,0,0],[0,1,-1],[0,1,1]].
  LinearOperator op = [](const std::vector<double>& in, std::vector<double>& out) {
    out[0] = in[0];
    out[1] = in[1] - in[2];
    out[2] = in[2] + in[1];
  };
  std::vector<double> rhs{0.0, 1.0, 0.0};
  std::vector<double> x(3, 0.0);
  SolveReport rep = gmres_solve(op, rhs, x, {1e-12, 30, 100});
  CHECK(rep.converged);
  CHECK(rep.iterations <= 3);
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(x[2] == doctest::Approx(-0.5).epsilon(1e-10));
  // Substitution: A x = rhs.
  std::vector<double> ax(3);
  op(x, ax);
  CHECK(ax[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ax[2] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("zero right-hand side returns zero immediately") {
  LinearOperator op = [](const std::vector<double>& in, std::vector<double>& out) { out = in; };
  std::vector<double> rhs(5, 0.0);
  std::vector<double> x(5, 3.0);  // stale guess must be discarded
  SolveReport rep = gmres_solve(op, rhs, x, {1e-11, 30, 100});
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("matches a dense LU solve on a random unsymmetric system") {
  const int n = 24;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) += 0.3 * u(rng);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = u(rng);

  std::vector<double> rhs(b.data(), b.data() + n);
  std::vector<double> x(n, 0.0);
  SolveReport rep = gmres_solve(dense_op(A), rhs, x, {1e-13, n, 10 * n});
  CHECK(rep.converged);
  CHECK(rep.iterations <= n);

  Eigen::VectorXd x_ref = A.lu().solve(b);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(x_ref(i)).epsilon(1e-8));
  CHECK(residual_norm(A, rhs, x) <= 1e-13 * b.norm() * 1.01);
  CHECK(rep.final_residual == doctest::Approx(residual_norm(A, rhs, x)).epsilon(1e-6));
}

TEST_CASE("an exact initial guess costs zero iterations") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4) * 2.0;
  std::vector<double> rhs{2.0, 4.0, 6.0, 8.0};
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  SolveReport rep = gmres_solve(dense_op(A), rhs, x, {1e-11, 30, 100});
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
}

TEST_CASE("restarts recover from a short Krylov window") {
  const int n = 24;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) += 0.2 * u(rng);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  std::vector<double> rhs(b.data(), b.data() + n);
  std::vector<double> x(n, 0.0);
  SolveReport rep = gmres_solve(dense_op(A), rhs, x, {1e-10, 5, 2000});
  CHECK(rep.converged);
  CHECK(residual_norm(A, rhs, x) <= 1e-10 * b.norm() * 1.01);
}

TEST_CASE("reports non-convergence instead of lying") {
  // Cyclic shift: GMRES stalls until the full dimension; a tight budget
  // cannot converge.
  const int n = 8;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) A((i + 1) % n, i) = 1.0;
  std::vector<double> rhs(n, 0.0);
  rhs[0] = 1.0;
  std::vector<double> x(n, 0.0);
  SolveReport rep = gmres_solve(dense_op(A), rhs, x, {1e-12, 2, 4});
  CHECK(!rep.converged);
  CHECK(rep.final_residual > 1e-6);

  // The same system solves exactly with a full-dimension window.
  std::vector<double> x2(n, 0.0);
  SolveReport rep2 = gmres_solve(dense_op(A), rhs, x2, {1e-12, n, 4 * n});
  CHECK(rep2.converged);
  CHECK(rep2.iterations <= n);
}

TEST_CASE("iteration count is bounded by the spectrum") {
  // Three distinct eigenvalues: convergence in at most three steps.
  const int n = 12;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = 1.0 + static_cast<double>(i % 3);
  Eigen::MatrixXd A = d.asDiagonal();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> rhs(n);
  for (double& v : rhs) v = u(rng);
  std::vector<double> x(n, 0.0);
  SolveReport rep = gmres_solve(dense_op(A), rhs, x, {1e-10, 30, 100});
  CHECK(rep.converged);
  CHECK(rep.iterations <= 3);
}

TEST_CASE("1d condition bound converges to the discrete extreme") {
  double epsilon = 2.0e-3, dt = 0.7, dx = 1.0 / 200, alpha = 0.05, eta = 3.0;
  ConditionEstimate bound = condition_number_1d(epsilon, dt, dx, alpha, eta);
  ConditionEstimate discrete = condition_number_1d_discrete(epsilon, dt, dx, 200, alpha, eta);
  CHECK(discrete.kappa <= bound.kappa);
  CHECK(discrete.kappa == doctest::Approx(bound.kappa).epsilon(1e-3));
}

TEST_CASE("single-cell discrete condition number has no exchange part") {
  double alpha = 0.1, eta = 2.0, dt = 0.5;
  ConditionEstimate est = condition_number_1d_discrete(1.0, dt, 0.1, 1, alpha, eta);
  double lambda = alpha * (1.0 + 2.0 * eta / dt);
  CHECK(est.lambda_max == doctest::Approx(lambda).epsilon(1e-14));
  CHECK(est.kappa == doctest::Approx(std::sqrt(1.0 + lambda * lambda)).epsilon(1e-14));
}

TEST_CASE("1d closed form matches a dense SVD of the assembled operator") {
  const int nx = 12;
  Grid g(nx, 1, 1, 1.0 / nx, 1.0, 1.0);
  StepperConfig cfg;
  cfg.epsilon = 2.0e-3;
  cfg.alpha = 0.05;
  cfg.eta = 3.0;
  cfg.dt = 0.7;
  VectorField m(g);
  m.fill({1.0, 0.0, 0.0});

  Eigen::MatrixXd A = testutil::dense_probe(
      g, [&](const VectorField& v) { return apply_system_operator(m, v, cfg); });
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double kappa = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  ConditionEstimate est =
      condition_number_1d_discrete(cfg.epsilon, cfg.dt, g.dx, nx, cfg.alpha, cfg.eta);
  CHECK(kappa == doctest::Approx(est.kappa).epsilon(1e-6));
}

TEST_CASE("3d closed form matches a dense SVD of the assembled operator") {
  Grid g(3, 2, 2, 0.25, 0.5, 1.0 / 3.0);
  StepperConfig cfg;
  cfg.epsilon = 0.01;
  cfg.alpha = 0.02;
  cfg.eta = 10.0;
  cfg.dt = 0.2;
  VectorField m(g);
  m.fill({1.0, 0.0, 0.0});

  Eigen::MatrixXd A = testutil::dense_probe(
      g, [&](const VectorField& v) { return apply_system_operator(m, v, cfg); });
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double kappa = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  ConditionEstimate est = condition_number_3d_discrete(cfg.epsilon, cfg.dt, g.dx, g.dy, g.dz,
                                                       g.nx, g.ny, g.nz, cfg.alpha, cfg.eta);
  CHECK(kappa == doctest::Approx(est.kappa).epsilon(1e-6));
}

TEST_CASE("condition number grows with damping and inertia as advertised") {
  // Smaller alpha and smaller eta/dt both shrink kappa.
  double eps = 4.0e-4, dt = 1.77e-2, dx = 0.02;
  double k_big = condition_number_3d(eps, dt, dx, dx, dx, 0.1, 17.7).kappa;
  double k_small_alpha = condition_number_3d(eps, dt, dx, dx, dx, 0.01, 17.7).kappa;
  double k_small_eta = condition_number_3d(eps, dt, dx, dx, dx, 0.1, 0.177).kappa;
  CHECK(k_small_alpha < k_big);
  CHECK(k_small_eta < k_big);
}
