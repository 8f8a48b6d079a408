#include "illg/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace illg {

Grid::Grid(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_)
    : nx(nx_), ny(ny_), nz(nz_), dx(dx_), dy(dy_), dz(dz_) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw std::invalid_argument("Grid: cell counts must be >= 1");
  if (!(dx > 0.0) || !(dy > 0.0) || !(dz > 0.0))
    throw std::invalid_argument("Grid: spacings must be positive");
}

void VectorField::fill(const Vec3& v) {
  for (std::size_t c = 0; c < cells(); ++c) set(c, v);
}

void apply_laplacian_raw(const Grid& g, const double* in, double* out) {
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  const double wx = 1.0 / (g.dx * g.dx);
  const double wy = 1.0 / (g.dy * g.dy);
  const double wz = 1.0 / (g.dz * g.dz);
  const std::size_t sx = 3;
  const std::size_t sy = 3 * static_cast<std::size_t>(nx);
  const std::size_t sz = sy * static_cast<std::size_t>(ny);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t b = 3 * g.index(i, j, k);
        for (int c = 0; c < 3; ++c) {
          const double m = in[b + c];
          double acc = 0.0;
          if (i > 0) acc += wx * (in[b + c - sx] - m);
          if (i + 1 < nx) acc += wx * (in[b + c + sx] - m);
          if (j > 0) acc += wy * (in[b + c - sy] - m);
          if (j + 1 < ny) acc += wy * (in[b + c + sy] - m);
          if (k > 0) acc += wz * (in[b + c - sz] - m);
          if (k + 1 < nz) acc += wz * (in[b + c + sz] - m);
          out[b + c] = acc;
        }
      }
    }
  }
}

VectorField apply_laplacian(const Grid& g, const VectorField& f) {
  if (!(f.grid == g)) throw std::invalid_argument("apply_laplacian: grid mismatch");
  VectorField out(g);
  apply_laplacian_raw(g, f.values.data(), out.values.data());
  return out;
}

std::vector<Vec3> cell_centers(const Grid& g) {
  std::vector<Vec3> centers;
  centers.reserve(g.cell_count());
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        centers.push_back({(i + 0.5) * g.dx, (j + 0.5) * g.dy, (k + 0.5) * g.dz});
  return centers;
}

Vec3 spatial_average(const VectorField& f) {
  const std::size_t n = f.cells();
  if (n == 0) throw std::invalid_argument("spatial_average: empty field");
  Vec3 sum{};
  for (std::size_t c = 0; c < n; ++c) sum += f.at(c);
  return sum / static_cast<double>(n);
}

double max_unit_deviation(const VectorField& f) {
  double dev = 0.0;
  for (std::size_t c = 0; c < f.cells(); ++c)
    dev = std::max(dev, std::abs(norm(f.at(c)) - 1.0));
  return dev;
}

}  // namespace illg
