#include "illg/energy.hpp"

#include <stdexcept>

namespace illg {

EnergyReport ll_energy(const VectorField& m, double epsilon, double q, EasyAxis axis,
                       const Vec3& h_applied, const VectorField* h_stray, double si_unit) {
  if (h_stray && !(h_stray->grid == m.grid))
    throw std::invalid_argument("ll_energy: stray field grid mismatch");
  const Grid& g = m.grid;
  const double vol = g.cell_volume();

  EnergyReport r;
  r.si_unit = si_unit;

  double ex = 0.0;
  auto face = [&](std::size_t a, std::size_t b, double h) {
    const Vec3 d = m.at(b) - m.at(a);
    ex += dot(d, d) / (h * h);
  };
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (i + 1 < g.nx) face(g.index(i, j, k), g.index(i + 1, j, k), g.dx);
        if (j + 1 < g.ny) face(g.index(i, j, k), g.index(i, j + 1, k), g.dy);
        if (k + 1 < g.nz) face(g.index(i, j, k), g.index(i, j, k + 1), g.dz);
      }
  r.exchange = 0.5 * epsilon * ex * vol;

  double aniso = 0.0, zee = 0.0, stray = 0.0;
  for (std::size_t c = 0; c < m.cells(); ++c) {
    const Vec3 mc = m.at(c);
    const Vec3 tr = transverse_part(mc, axis);
    aniso += dot(tr, tr);
    zee -= dot(h_applied, mc);
    if (h_stray) stray -= 0.5 * dot(h_stray->at(c), mc);
  }
  r.anisotropy = 0.5 * q * aniso * vol;
  r.zeeman = zee * vol;
  r.stray = stray * vol;
  return r;
}

EnergyReport total_energy(EnergyReport free_energy, const VectorField& m_curr,
                          const VectorField& m_prev, double dt, double alpha, double eta) {
  if (!(m_prev.grid == m_curr.grid)) throw std::invalid_argument("total_energy: grid mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("total_energy: dt must be positive");
  double k = 0.0;
  for (std::size_t c = 0; c < m_curr.cells(); ++c) {
    const Vec3 v = (m_curr.at(c) - m_prev.at(c)) / dt;
    k += dot(v, v);
  }
  free_energy.kinetic = 0.5 * alpha * eta * k * m_curr.grid.cell_volume();
  return free_energy;
}

double energy_law_residual(const TrajectoryWindow& w, double alpha) {
  if (!w.m_before || !w.m_after) throw std::invalid_argument("energy_law_residual: null fields");
  if (!(w.m_before->grid == w.m_after->grid))
    throw std::invalid_argument("energy_law_residual: grid mismatch");
  if (!(w.dt > 0.0)) throw std::invalid_argument("energy_law_residual: dt must be positive");
  const double dJ = (w.J_after - w.J_before) / (2.0 * w.dt);
  double diss = 0.0;
  for (std::size_t c = 0; c < w.m_before->cells(); ++c) {
    const Vec3 v = (w.m_after->at(c) - w.m_before->at(c)) / (2.0 * w.dt);
    diss += dot(v, v);
  }
  return dJ + alpha * diss * w.m_before->grid.cell_volume();
}

}  // namespace illg
