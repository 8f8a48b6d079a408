#pragma once

#include <cstddef>
#include <vector>

#include "illg/vec3.hpp"

namespace illg {

/// Uniform cell-centered grid. Cell (i,j,k), 0-based, sits at
/// ((i+1/2)dx, (j+1/2)dy, (k+1/2)dz). Spacings are dimensionless
/// (rescaled by the sample's length unit).
struct Grid {
  int nx = 1, ny = 1, nz = 1;
  double dx = 1.0, dy = 1.0, dz = 1.0;

  Grid() = default;
  Grid(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_);

  [[nodiscard]] std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }

  /// Canonical layout: x fastest, then y, then z.
  [[nodiscard]] std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
  }

  [[nodiscard]] double cell_volume() const { return dx * dy * dz; }

  friend bool operator==(const Grid& a, const Grid& b) = default;
};

/// Three doubles per cell, stored (mx,my,mz) contiguously in canonical
/// cell order, so values.data() doubles as a flat 3N solver vector.
struct VectorField {
  Grid grid{};
  std::vector<double> values;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g), values(3 * g.cell_count(), 0.0) {}

  [[nodiscard]] std::size_t cells() const { return values.size() / 3; }

  [[nodiscard]] Vec3 at(std::size_t c) const {
    return {values[3 * c], values[3 * c + 1], values[3 * c + 2]};
  }

  void set(std::size_t c, const Vec3& v) {
    values[3 * c] = v.x;
    values[3 * c + 1] = v.y;
    values[3 * c + 2] = v.z;
  }

  void fill(const Vec3& v);
};

/// 7-point Laplacian with homogeneous Neumann closure: boundary faces use a
/// mirror ghost equal to the boundary cell, so their flux contribution is
/// zero. Raw variant writes into out (size 3N), no aliasing with in allowed.
void apply_laplacian_raw(const Grid& g, const double* in, double* out);

/// Throws std::invalid_argument if f.grid differs from g.
[[nodiscard]] VectorField apply_laplacian(const Grid& g, const VectorField& f);

/// Cell centers in canonical layout order.
[[nodiscard]] std::vector<Vec3> cell_centers(const Grid& g);

/// Arithmetic mean of the per-cell vectors. Throws on an empty field.
[[nodiscard]] Vec3 spatial_average(const VectorField& f);

/// max_c | |m_c| - 1 |, for unit-norm audits.
[[nodiscard]] double max_unit_deviation(const VectorField& f);

}  // namespace illg
