#pragma once

#include <optional>

#include "illg/grid.hpp"
#include "illg/vec3.hpp"

namespace illg {

/// SI material constants. mu0 defaults to 4*pi*1e-7; overridable so runs can
/// pin the exact value a reference dataset used.
struct MaterialParams {
  double Ms = 0.0;      // saturation magnetization, A/m
  double A_ex = 0.0;    // exchange constant, J/m
  double Ku = 0.0;      // uniaxial anisotropy constant, J/m^3
  double alpha = 0.0;   // Gilbert damping, dimensionless
  double tau = 0.0;     // inertial relaxation time, s
  double gamma = 1.76086e11;             // gyromagnetic ratio, rad/(s*T)
  double mu0 = 1.25663706143591729e-06;  // vacuum permeability, T*m/A
};

/// Dimensionless groups of the rescaled equation. Time unit is
/// 1/(mu0*gamma*Ms) seconds, lengths are in units of L.
struct DimensionlessParams {
  double epsilon = 0.0;  // A_ex / (mu0 * Ms^2 * L^2)
  double q = 0.0;        // Ku / (mu0 * Ms^2)
  double eta = 0.0;      // tau * mu0 * gamma * Ms
  double t_unit = 0.0;   // seconds per dimensionless time unit
};

enum class EasyAxis { X, Y, Z };

/// Applied field program. Field values are dimensionless (units of Ms).
/// The pulse is amplitude*sin(2*pi*f*t) along pulse_direction while
/// window_start <= t < window_end (t in seconds).
struct AppliedFieldSpec {
  Vec3 constant{};
  double pulse_amplitude = 0.0;
  double pulse_frequency = 0.0;  // Hz
  Vec3 pulse_direction{};
  double window_start = 0.0;  // s
  double window_end = 0.0;    // s
  std::optional<double> canting_deg;  // in-plane rotation applied at config ingestion
};

struct Nondimensional {
  DimensionlessParams params;
  double dt = 0.0;  // dimensionless timestep
};

/// Converts SI constants to the dimensionless groups for length unit L (m)
/// and physical timestep dt_phys (s). Throws std::invalid_argument for
/// non-positive Ms, L, dt_phys or negative A_ex/Ku/alpha/tau.
[[nodiscard]] Nondimensional nondimensionalize(const MaterialParams& mat, double L, double dt_phys);

/// Uniform applied field at physical time t (s).
[[nodiscard]] Vec3 applied_field_at(double t, const AppliedFieldSpec& spec);

/// Local (Laplacian-free) part of the effective field:
///   f = -q * m_transverse + h_applied + h_stray,
/// where m_transverse zeroes the easy-axis component. h_stray may be null
/// when the stray field is disabled.
[[nodiscard]] VectorField local_field(const VectorField& m, const Vec3& h_applied,
                                      const VectorField* h_stray, double q, EasyAxis axis);

/// Full effective field h = epsilon * lap(m) + f_local.
[[nodiscard]] VectorField effective_field(const VectorField& m, double epsilon,
                                          const VectorField& f_local);

/// Projects out the easy-axis component (helper shared with the energy module).
[[nodiscard]] Vec3 transverse_part(const Vec3& m, EasyAxis axis);

}  // namespace illg
