#pragma once

#include "illg/grid.hpp"
#include "illg/physics.hpp"

namespace illg {

/// Dimensionless energy components; multiply by si_unit (= mu0 Ms^2 L^3) for
/// joules. F is the free (Landau-Lifshitz) energy, J adds the kinetic term
/// of the inertial dynamics.
struct EnergyReport {
  double exchange = 0.0;
  double anisotropy = 0.0;
  double zeeman = 0.0;
  double stray = 0.0;
  double kinetic = 0.0;
  double si_unit = 1.0;

  [[nodiscard]] double F() const { return exchange + anisotropy + zeeman + stray; }
  [[nodiscard]] double J() const { return F() + kinetic; }
  [[nodiscard]] double F_joules() const { return F() * si_unit; }
  [[nodiscard]] double J_joules() const { return J() * si_unit; }
};

/// Free energy of a configuration:
///   exchange   (epsilon/2) sum_faces |m_R - m_L|^2 / h^2 * vol
///   anisotropy (q/2) sum |m_transverse|^2 * vol
///   zeeman     -sum h_applied . m * vol
///   stray      -(1/2) sum h_stray . m * vol
/// The face form of the exchange term matches the mirror-BC Laplacian under
/// summation by parts, so the semidiscrete dissipation law is exact.
/// h_stray may be null when the stray field is disabled.
[[nodiscard]] EnergyReport ll_energy(const VectorField& m, double epsilon, double q,
                                     EasyAxis axis, const Vec3& h_applied,
                                     const VectorField* h_stray, double si_unit = 1.0);

/// Adds the kinetic term (alpha*eta/2) sum |(m_curr - m_prev)/dt|^2 * vol to
/// a free-energy report (backward difference at the current level).
[[nodiscard]] EnergyReport total_energy(EnergyReport free_energy, const VectorField& m_curr,
                                        const VectorField& m_prev, double dt, double alpha,
                                        double eta);

/// Three consecutive samples, uniformly spaced in dimensionless time, for
/// checking the dissipation identity dJ/dt = -alpha * sum |dm/dt|^2 * vol
/// under a constant applied field. m_before/m_after bracket the middle time.
struct TrajectoryWindow {
  double dt = 0.0;
  double J_before = 0.0;
  double J_after = 0.0;
  const VectorField* m_before = nullptr;
  const VectorField* m_after = nullptr;
};

/// Centered-difference residual of the dissipation identity; O(dt^2) on a
/// trajectory of the scheme, exactly 0 on a stationary state.
[[nodiscard]] double energy_law_residual(const TrajectoryWindow& w, double alpha);

}  // namespace illg
