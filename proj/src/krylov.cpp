#include "illg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace illg {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveReport gmres_solve(const LinearOperator& op, const std::vector<double>& rhs,
                        std::vector<double>& x, const KrylovConfig& cfg) {
  const std::size_t n = rhs.size();
  if (x.size() != n) throw std::invalid_argument("gmres_solve: x0 size mismatch");
  if (cfg.restart < 1 || cfg.max_iters < 1 || !(cfg.tol > 0.0))
    throw std::invalid_argument("gmres_solve: bad config");

  SolveReport report;
  const double bnorm = norm2(rhs);
  if (bnorm < 1.0e-300) {
    // Degenerate rhs: the solution of A x = 0 for our nonsingular operators.
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    return report;
  }
  const double target = cfg.tol * bnorm;
  const int m = cfg.restart;

  std::vector<double> r(n), w(n);
  std::vector<std::vector<double>> V;
  std::vector<double> H((m + 1) * m, 0.0);  // column-major, H[i + j*(m+1)]
  std::vector<double> cs(m), sn(m), g(m + 1);

  auto true_residual = [&](std::vector<double>& out) {
    op(x, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] - out[i];
  };

  true_residual(r);
  double rnorm = norm2(r);
  report.final_residual = rnorm;
  if (rnorm <= target) {
    report.converged = true;
    return report;
  }

  while (report.iterations < cfg.max_iters) {
    std::fill(H.begin(), H.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    V.assign(1, r);
    for (double& v : V[0]) v /= rnorm;

    int j = 0;  // Arnoldi steps completed in this cycle
    bool breakdown = false;
    while (j < m && report.iterations < cfg.max_iters) {
      op(V[j], w);
      ++report.iterations;
      for (int i = 0; i <= j; ++i) {
        const double h = dot(w, V[i]);
        H[i + j * (m + 1)] = h;
        for (std::size_t t = 0; t < n; ++t) w[t] -= h * V[i][t];
      }
      double hN = norm2(w);
      H[j + 1 + j * (m + 1)] = hN;

      // Previous Givens rotations applied to the new column.
      for (int i = 0; i < j; ++i) {
        const double t0 = H[i + j * (m + 1)];
        const double t1 = H[i + 1 + j * (m + 1)];
        H[i + j * (m + 1)] = cs[i] * t0 + sn[i] * t1;
        H[i + 1 + j * (m + 1)] = -sn[i] * t0 + cs[i] * t1;
      }
      const double a = H[j + j * (m + 1)];
      const double b = H[j + 1 + j * (m + 1)];
      const double rho = std::hypot(a, b);
      cs[j] = (rho == 0.0) ? 1.0 : a / rho;
      sn[j] = (rho == 0.0) ? 0.0 : b / rho;
      H[j + j * (m + 1)] = rho;
      H[j + 1 + j * (m + 1)] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++j;

      if (hN < 1.0e-300) {
        breakdown = true;  // happy breakdown: exact solution in the current space
        break;
      }
      V.emplace_back(w);
      for (double& v : V.back()) v /= hN;

      if (std::abs(g[j]) <= target) break;
    }

    // x += V y with R y = g solved backward.
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int kk = i + 1; kk < j; ++kk) s -= H[i + kk * (m + 1)] * y[kk];
      y[i] = s / H[i + i * (m + 1)];
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t t = 0; t < n; ++t) x[t] += y[i] * V[i][t];

    true_residual(r);
    rnorm = norm2(r);
    report.final_residual = rnorm;
    if (rnorm <= target || breakdown) {
      report.converged = rnorm <= target;
      return report;
    }
  }
  report.converged = rnorm <= target;
  return report;
}

namespace {

ConditionEstimate from_lambda(double lambda) {
  ConditionEstimate e;
  e.lambda_max = lambda;
  e.kappa = std::sqrt(1.0 + lambda * lambda);
  return e;
}

/// Largest sin^2(k*pi/(2n)) over the resolved modes k = 0..n-1.
double max_mode(int n) {
  if (n < 2) return 0.0;
  const double s = std::sin((n - 1) * M_PI / (2.0 * n));
  return s * s;
}

}  // namespace

ConditionEstimate condition_number_1d(double epsilon, double dt, double dx, double alpha,
                                      double eta) {
  return from_lambda(4.0 * epsilon * dt / (dx * dx) + alpha * (1.0 + 2.0 * eta / dt));
}

ConditionEstimate condition_number_3d(double epsilon, double dt, double dx, double dy, double dz,
                                      double alpha, double eta) {
  const double lap = 4.0 * (1.0 / (dx * dx) + 1.0 / (dy * dy) + 1.0 / (dz * dz));
  return from_lambda(epsilon * dt * lap + alpha * (1.0 + 2.0 * eta / dt));
}

ConditionEstimate condition_number_1d_discrete(double epsilon, double dt, double dx, int nx,
                                               double alpha, double eta) {
  const double lap = 4.0 / (dx * dx) * max_mode(nx);
  return from_lambda(epsilon * dt * lap + alpha * (1.0 + 2.0 * eta / dt));
}

ConditionEstimate condition_number_3d_discrete(double epsilon, double dt, double dx, double dy,
                                               double dz, int nx, int ny, int nz, double alpha,
                                               double eta) {
  const double lap = 4.0 * (max_mode(nx) / (dx * dx) + max_mode(ny) / (dy * dy) +
                            max_mode(nz) / (dz * dz));
  return from_lambda(epsilon * dt * lap + alpha * (1.0 + 2.0 * eta / dt));
}

}  // namespace illg
