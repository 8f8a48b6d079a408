#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>

#include "illg/grid.hpp"

namespace testutil {

/// Probes a linear VectorField -> VectorField map into a dense matrix.
template <typename Op>
Eigen::MatrixXd dense_probe(const illg::Grid& g, Op&& op) {
  const int n = static_cast<int>(3 * g.cell_count());
  Eigen::MatrixXd A(n, n);
  illg::VectorField e(g);
  for (int j = 0; j < n; ++j) {
    std::fill(e.values.begin(), e.values.end(), 0.0);
    e.values[static_cast<std::size_t>(j)] = 1.0;
    illg::VectorField col = op(e);
    for (int i = 0; i < n; ++i) A(i, j) = col.values[static_cast<std::size_t>(i)];
  }
  return A;
}

inline illg::VectorField random_unit_field(const illg::Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  illg::VectorField f(g);
  for (std::size_t c = 0; c < f.cells(); ++c) {
    illg::Vec3 v;
    double vn = 0.0;
    do {
      v = {n01(rng), n01(rng), n01(rng)};
      vn = illg::norm(v);
    } while (vn < 1.0e-6);
    f.set(c, {v.x / vn, v.y / vn, v.z / vn});
  }
  return f;
}

}  // namespace testutil
