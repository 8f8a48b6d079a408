#pragma once

#include <functional>
#include <vector>

namespace illg {

struct KrylovConfig {
  double tol = 1.0e-11;  // relative to ||rhs||
  int restart = 30;
  int max_iters = 500;
};

struct SolveReport {
  int iterations = 0;       // Arnoldi steps (operator applications after the initial residual)
  double final_residual = 0.0;  // absolute 2-norm of rhs - A x
  bool converged = false;
};

/// y = A x for a vector of size n; out is preallocated, in/out never alias.
using LinearOperator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Restarted GMRES, modified Gram-Schmidt Arnoldi, Givens least squares.
/// x holds the initial guess on entry and the solution on exit. Stops when
/// ||rhs - A x|| <= tol * ||rhs||; if ||rhs|| < 1e-300 the test is absolute
/// and a zero rhs returns x = 0 immediately. The residual is recomputed from
/// scratch at every restart, so the report is trustworthy.
SolveReport gmres_solve(const LinearOperator& op, const std::vector<double>& rhs,
                        std::vector<double>& x, const KrylovConfig& cfg);

/// Condition-number estimate for the per-step operator
///   I + epsilon*dt*(m x lap) - alpha*(1 + 2*eta/dt)*(m x)
/// with uniform m. With m uniform the operator is normal per Laplacian
/// eigenmode, so kappa = sqrt(1 + lambda_max^2) exactly, where lambda_max is
/// the extreme magnitude of epsilon*dt*mu + alpha*(1+2*eta/dt) over the
/// Neumann eigenvalues mu of -lap.
struct ConditionEstimate {
  double kappa = 1.0;
  double lambda_max = 0.0;
};

/// Closed-form bound, sin^2 terms taken at their supremum 1.
[[nodiscard]] ConditionEstimate condition_number_1d(double epsilon, double dt, double dx,
                                                    double alpha, double eta);
[[nodiscard]] ConditionEstimate condition_number_3d(double epsilon, double dt, double dx, double dy,
                                                    double dz, double alpha, double eta);

/// Same closed form evaluated at the exact extreme of the discrete mirror-BC
/// spectrum, -4/h^2 * sin^2(k*pi/(2n)), k = 0..n-1. This is what a dense SVD
/// of the assembled operator reproduces.
[[nodiscard]] ConditionEstimate condition_number_1d_discrete(double epsilon, double dt, double dx,
                                                             int nx, double alpha, double eta);
[[nodiscard]] ConditionEstimate condition_number_3d_discrete(double epsilon, double dt, double dx,
                                                             double dy, double dz, int nx, int ny,
                                                             int nz, double alpha, double eta);

}  // namespace illg
