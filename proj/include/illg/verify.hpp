#pragma once

#include <vector>

#include "illg/grid.hpp"
#include "illg/krylov.hpp"
#include "illg/vec3.hpp"

// Forward declaration so the header does not leak <fftw3.h>.
struct fftw_plan_s;

namespace illg {

/// Parameters of a manufactured-solution run of the verification equation
///   dm/dt = -m x lap m + alpha*(m x (dm/dt + eta*d2m/dt2)) + g,
/// the full equation with unit exchange, no other fields, and a known source.
/// Dropping the cross product from the damping term looks like an innocent
/// simplification but is not: it turns the high-frequency inertial modes into
/// growing ones (one root of alpha*eta*s^2 -+ s + i*mu = 0 has real part
/// ~ sqrt(mu/(2*alpha*eta)) for either sign), so round-off explodes under
/// refinement. The cross product keeps those modes rotating instead.
struct ManufacturedCase {
  int dim = 1;  // 1: solution varies in x only; 3: full product form
  double alpha = 0.0;
  double eta = 0.0;
};

/// phi(s) = s^2 (1-s)^2 vanishes with its derivative at s = 0, 1, so the
/// exact solutions below satisfy the homogeneous Neumann condition on the
/// unit interval/cube. Unit norm by construction.
[[nodiscard]] Vec3 exact_solution_1d(double x, double t);
[[nodiscard]] Vec3 exact_solution_3d(double x, double y, double z, double t);

/// Closed-form source that makes the exact solution solve the verification
/// equation:
///   g = dm_e/dt + m_e x lap m_e - alpha*(m_e x (dm_e/dt + eta*d2m_e/dt2)).
/// For these solutions d2m_e/dt2 = -m_e, so the eta part of the source
/// vanishes; eta still shapes the run through the scheme coefficients.
[[nodiscard]] Vec3 source_term(const ManufacturedCase& mc, const Vec3& pos, double t);

/// Exact solution / source sampled at the cell centers.
[[nodiscard]] VectorField sample_exact(const ManufacturedCase& mc, const Grid& g, double t);
[[nodiscard]] VectorField sample_source(const ManufacturedCase& mc, const Grid& g, double t);

/// max over cells and components of |a - b|. Grids must match.
[[nodiscard]] double linf_error(const VectorField& a, const VectorField& b);

/// Least-squares slope of log(error) against log(step). Positive for errors
/// decaying with the step. Throws unless sizes match, >= 2 samples, and all
/// entries are positive.
[[nodiscard]] double convergence_order(const std::vector<double>& errors,
                                       const std::vector<double>& steps);

/// Exact inverse of the update operator with the magnetization frozen to one
/// uniform unit axis u:
///   P = I + epsilon*dt*(u x lap_h .) - damp*(u x .),
/// block-diagonal in the cell-centered cosine basis (the eigenbasis of the
/// Neumann Laplacian): each mode is the 3x3 matrix I - theta*(u x .) with
/// theta = epsilon*dt*mu_mode + damp, inverted in closed form. Left-applied
/// it turns the manufactured-solution systems, whose exact fields are nearly
/// uniform in space, into small perturbations of the identity, which keeps
/// the Krylov iteration count flat under refinement. Holds scratch, so one
/// instance is not safe for concurrent use. Move-only (owns plans).
class UniformAxisPreconditioner {
 public:
  /// Throws std::invalid_argument if dt <= 0, std::runtime_error on plan
  /// failure. damp is the cross coefficient alpha*(1 + 2*eta/dt).
  UniformAxisPreconditioner(const Grid& g, double epsilon, double dt, double damp);
  UniformAxisPreconditioner() = default;
  ~UniformAxisPreconditioner();
  UniformAxisPreconditioner(UniformAxisPreconditioner&&) noexcept;
  UniformAxisPreconditioner& operator=(UniformAxisPreconditioner&&) noexcept;
  UniformAxisPreconditioner(const UniformAxisPreconditioner&) = delete;
  UniformAxisPreconditioner& operator=(const UniformAxisPreconditioner&) = delete;

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const Vec3& axis() const { return axis_; }

  /// Normalizes and stores the axis (the natural choice is the spatial
  /// average of the current level). Throws std::invalid_argument on zero.
  void set_axis(const Vec3& u);

  /// v <- P^{-1} v for a flat 3N vector in field layout. Throws
  /// std::invalid_argument on a size mismatch.
  void apply_inverse(std::vector<double>& v);

 private:
  Grid grid_{};
  Vec3 axis_{0.0, 0.0, 1.0};
  double scale_ = 1.0;           // undoes the unnormalized transform round trip
  std::vector<double> theta_;    // epsilon*dt*mu + damp, canonical mode order
  std::vector<double> buf_;      // transform workspace (plans point here)
  std::vector<double> spec_[3];  // per-component spectra
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* inv_ = nullptr;
};

struct MmsResult {
  double error = 0.0;    // L_inf against the exact solution at final time
  int max_iterations = 0;  // worst GMRES iteration count over the run
};

/// Integrates the verification scheme to T with nt uniform steps, both
/// starting levels seeded from the exact solution, and returns the final
/// error. Solves run under a UniformAxisPreconditioner refreshed each step
/// from the spatial average of the current level.
[[nodiscard]] MmsResult run_manufactured(const ManufacturedCase& mc, const Grid& g, int nt,
                                         double T, const KrylovConfig& krylov);

/// Convenience: default solver settings sized for the convergence studies.
[[nodiscard]] KrylovConfig mms_solver_defaults();

}  // namespace illg
