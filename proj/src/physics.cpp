#include "illg/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace illg {

Nondimensional nondimensionalize(const MaterialParams& mat, double L, double dt_phys) {
  if (!(mat.Ms > 0.0)) throw std::invalid_argument("nondimensionalize: Ms must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("nondimensionalize: length unit must be positive");
  if (!(dt_phys > 0.0)) throw std::invalid_argument("nondimensionalize: timestep must be positive");
  if (mat.A_ex < 0.0 || mat.Ku < 0.0 || mat.alpha < 0.0 || mat.tau < 0.0)
    throw std::invalid_argument("nondimensionalize: A_ex, Ku, alpha, tau must be non-negative");
  if (!(mat.gamma > 0.0) || !(mat.mu0 > 0.0))
    throw std::invalid_argument("nondimensionalize: gamma and mu0 must be positive");

  const double mu0Ms2 = mat.mu0 * mat.Ms * mat.Ms;
  const double rate = mat.mu0 * mat.gamma * mat.Ms;  // 1/s
  Nondimensional out;
  out.params.epsilon = mat.A_ex / (mu0Ms2 * L * L);
  out.params.q = mat.Ku / mu0Ms2;
  out.params.eta = mat.tau * rate;
  out.params.t_unit = 1.0 / rate;
  out.dt = dt_phys * rate;
  return out;
}

Vec3 applied_field_at(double t, const AppliedFieldSpec& spec) {
  Vec3 h = spec.constant;
  if (spec.pulse_amplitude != 0.0 && t >= spec.window_start && t < spec.window_end) {
    const double s = spec.pulse_amplitude * std::sin(2.0 * M_PI * spec.pulse_frequency * t);
    h += s * spec.pulse_direction;
  }
  return h;
}

Vec3 transverse_part(const Vec3& m, EasyAxis axis) {
  switch (axis) {
    case EasyAxis::X: return {0.0, m.y, m.z};
    case EasyAxis::Y: return {m.x, 0.0, m.z};
    default: return {m.x, m.y, 0.0};
  }
}

VectorField local_field(const VectorField& m, const Vec3& h_applied,
                        const VectorField* h_stray, double q, EasyAxis axis) {
  if (h_stray && !(h_stray->grid == m.grid))
    throw std::invalid_argument("local_field: stray field grid mismatch");
  VectorField f(m.grid);
  for (std::size_t c = 0; c < m.cells(); ++c) {
    Vec3 v = h_applied - q * transverse_part(m.at(c), axis);
    if (h_stray) v += h_stray->at(c);
    f.set(c, v);
  }
  return f;
}

VectorField effective_field(const VectorField& m, double epsilon, const VectorField& f_local) {
  if (!(f_local.grid == m.grid))
    throw std::invalid_argument("effective_field: grid mismatch");
  VectorField h = apply_laplacian(m.grid, m);
  for (std::size_t i = 0; i < h.values.size(); ++i)
    h.values[i] = epsilon * h.values[i] + f_local.values[i];
  return h;
}

}  // namespace illg
